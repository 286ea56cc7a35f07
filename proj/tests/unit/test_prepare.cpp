#include "bellforge/prepare.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bellforge;

namespace {

// 1/2 ||uu* - vv*||_1 from the 2x2 Gram matrix
double gram_trace_distance(const Vec& u, const Vec& v) {
    const double a = u.squaredNorm(), b = v.squaredNorm();
    return 0.5 * std::sqrt(std::max(0.0, (a + b) * (a + b) - 4.0 * std::norm(u.dot(v))));
}

}  // namespace

TEST_CASE("post-measurement states of the honest strategy") {
    Strategy s = honest_strategy(1);
    Mat z = post_measurement_rho(s, make_set(5, 1, {{3}}), {3}, {1});
    Mat want = Mat::Zero(2, 2);
    want(0, 0) = 1.0;
    CHECK((z - want).norm() < 1e-12);
    Mat x = post_measurement_rho(s, make_set(5, 1, {{1}}), {1}, {-1});
    CHECK((x - eigenprojector(kX, -1)).norm() < 1e-12);
    // A_2 = -sigma_y steers Bob to the sigma_y eigenstate with the same sign
    Mat y = post_measurement_rho(s, make_set(5, 1, {{2}}), {2}, {1});
    CHECK((y - eigenprojector(kY, 1)).norm() < 1e-12);
    CHECK(std::abs(y.trace() - 1.0) < 1e-12);
    CHECK_THROWS(post_measurement_rho(s, make_set(5, 1, {{2}}), {3}, {1}));
}

TEST_CASE("zero-probability outcome is an error") {
    Strategy s = densify(honest_strategy(1));
    auto d = std::make_shared<DenseModel>(*s.dense);
    d->psi = Vec::Zero(4);
    d->psi(0) = 1.0;  // |00>
    Strategy t = s;
    t.dense = d;
    CHECK_THROWS_AS(post_measurement_rho(t, make_set(5, 1, {{3}}), {3}, {-1}), std::domain_error);
}

TEST_CASE("ideal target") {
    Mat b0 = Mat::Zero(1, 1), b1 = Mat::Zero(1, 1);
    b0(0, 0) = 1.0;
    Mat t = ideal_target({3}, {1}, b0, b1);
    Mat want = tensor_product({b0, eigenprojector(kZ, 1), eigenprojector(kZ, 1)});
    CHECK((t - want).norm() < 1e-15);
    // all-x: both branches carry the same payload
    b0(0, 0) = 0.25;
    b1(0, 0) = 0.75;
    Mat flag0 = Mat::Zero(2, 2), flag1 = Mat::Zero(2, 2);
    flag0(0, 0) = 1.0;
    flag1(1, 1) = 1.0;
    Mat x = ideal_target({1}, {-1}, b0, b1);
    Mat wx = tensor_product({Mat(Mat::Ones(1, 1)), eigenprojector(kX, -1), 0.25 * flag0 + 0.75 * flag1});
    CHECK((x - wx).norm() < 1e-15);
    CHECK_THROWS(ideal_target({1}, {1}, b0, 2.0 * b1));
}

TEST_CASE("honest report is exact") {
    for (int n = 1; n <= 2; ++n) {
        Question chi(n, 2);
        chi[0] = 3;
        QuestionSet sp = make_set(5, n, {chi});
        PrepReport r = prep_distance_report(honest_strategy(n), sp, chi);
        CHECK(r.probability_sum == doctest::Approx(1.0));
        CHECK(r.beta0_trace + r.beta1_trace == doctest::Approx(1.0));
        CHECK(r.exceed_probability == 0.0);
        for (const auto& row : r.per_outcome) {
            CHECK(row.p == doctest::Approx(std::pow(0.5, n)));
            CHECK(row.D < 1e-9);
            CHECK(row.D_full < 1e-9);
        }
    }
}

TEST_CASE("threshold zero on a noisy strategy reports mass") {
    Strategy s = depolarize(honest_strategy(1), {NoiseSpec::Kind::depolarizing, 0.1});
    QuestionSet sp = make_set(5, 1, {{1}});
    PrepReport r = prep_distance_report(s, sp, {1}, 0.0);
    CHECK(r.exceed_probability > 0.5);
    PrepReport d = prep_distance_report(s, sp, {1});
    CHECK(d.exceed_probability <= d.bound);
    CHECK(d.full_exceed_probability <= d.full_bound);
    CHECK(d.delta_avg <= d.gamma + 1e-15);
}

TEST_CASE("trace distance helpers against the Gram oracle") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> scale(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Vec u = random_state(3, rng) * scale(rng), v = random_state(3, rng) * scale(rng);
        CHECK(projector_trace_distance(u, v) == doctest::Approx(gram_trace_distance(u, v)).epsilon(1e-9));
        CHECK(normalized_trace_distance(u, v) ==
              doctest::Approx(gram_trace_distance(u / u.norm(), v / v.norm())).epsilon(1e-9));
    }
    CHECK_THROWS(normalized_trace_distance(Vec::Zero(2), Vec::Ones(2)));
}

TEST_CASE("robust probability oracle") {
    SyntheticFamily f;
    f.pi = {1.0};
    Vec u = Vec::Zero(2);
    u(0) = 1.0;
    f.u = {{u}};
    f.v = {{u}};
    auto zero = robust_prob_oracle(f, 0.0, 2.0 / 3.0);
    CHECK(zero.hypothesis_ok);
    CHECK(zero.probability_within == 1.0);
    CHECK(zero.holds);

    // single outcome, ||u - v|| = delta: D = delta sqrt(1 - delta^2/4) <= delta^c for small delta
    const double delta = 0.1;
    Vec v = u;
    v(0) = 1.0 - delta * delta / 2.0;
    v(1) = delta * std::sqrt(1.0 - delta * delta / 4.0);
    f.v = {{v}};
    CHECK(family_delta(f) == doctest::Approx(delta));
    auto one = robust_prob_oracle(f, delta, 2.0 / 3.0);
    CHECK(one.hypothesis_ok);
    CHECK(one.probability_within == 1.0);
    CHECK(one.bound == doctest::Approx(4.0 * std::pow(delta, 2.0 / 3.0)));

    auto low = robust_prob_oracle(f, delta / 2.0, 2.0 / 3.0);
    CHECK_FALSE(low.hypothesis_ok);
}

TEST_CASE("random families are normalized") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        SyntheticFamily f = random_family(rng);
        double pis = 0.0;
        for (std::size_t s = 0; s < f.pi.size(); ++s) {
            pis += f.pi[s];
            double total = 0.0;
            for (const auto& x : f.u[s]) total += x.squaredNorm();
            CHECK(total == doctest::Approx(1.0));
        }
        CHECK(pis == doctest::Approx(1.0));
        auto r = robust_prob_oracle(f, family_delta(f), 2.0 / 3.0);
        CHECK(r.hypothesis_ok);
        CHECK(r.holds);
    }
}

TEST_CASE("outcome indexing") {
    CHECK(outcome_index({1, -1, -1}) == 3);
    CHECK(outcome_from_index(4, 3) == Outcomes{-1, 1, 1});
}
