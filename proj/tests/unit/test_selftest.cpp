#include "bellforge/selftest.hpp"
#include "bellforge/verifier.hpp"

#include <doctest.h>

#include <random>

using namespace bellforge;

TEST_CASE("side isometries are isometries") {
    std::mt19937_64 rng(4);
    for (int n = 1; n <= 2; ++n) {
        std::vector<std::array<Mat, 3>> ops(n);
        for (auto& o : ops)
            for (auto& m : o) m = random_involution(3, rng);
        for (bool alice : {true, false}) {
            Mat v = side_isometry(ops, alice);
            CHECK(v.rows() == 3 * (1 << (2 * n)));
            CHECK((v.adjoint() * v - identity(3)).norm() < 1e-10);
        }
    }
}

TEST_CASE("honest Bob operators and relation residuals") {
    Strategy s = densify(honest_strategy(2));
    CHECK((regularized_Q(s, 1, 3) - bob_combination(s, 3, 1)).norm() < 1e-12);
    CHECK_THROWS(regularized_Q(s, 1, 4));
    QuestionSet sp = make_set(5, 2, {{1, 3}});
    RelationReport r = relation_check(s, sp, {1, 3});
    CHECK(r.eta < 1e-12);
    CHECK(r.symmetry.size() == 6);
    CHECK(r.comm_bob.size() == 9);
    CHECK(r.acomm_bob.size() == 6);
    CHECK(r.conj.size() == 1);
    for (const auto& [k, v] : r.extra_linear) CHECK(v < 1e-12);
    CHECK(relation_violations(r, 0.0).empty());
    CHECK_THROWS(relation_check(s, sp, {2, 2}));
}

TEST_CASE("bound factors") {
    CHECK(symmetry_bound_factor() == 2.0);
    CHECK(comm_bob_bound_factor() == 8.0);
    CHECK(comm_alice_bound_factor() == 16.0);
    CHECK(acomm_alice_bound_factor() == doctest::Approx(2.0 * (1.0 + std::sqrt(2.0))));
    CHECK(acomm_bob_bound_factor(2, 1) == doctest::Approx(2.0 * (3.0 + std::sqrt(2.0))));
    CHECK(acomm_bob_bound_factor(1, 3) == doctest::Approx(2.0 * (4.0 + std::sqrt(2.0))));
    CHECK(acomm_bob_bound_factor(2, 3) == doctest::Approx(2.0 * (5.0 + std::sqrt(2.0))));
    CHECK(conj_bound_factor() == 21.0);
    CHECK_THROWS(acomm_bob_bound_factor(2, 2));
}

TEST_CASE("violations are listed by family") {
    RelationReport r;
    r.symmetry[{1, 2}] = 0.5;
    r.conj[1] = 0.1;
    auto v = relation_violations(r, 0.01);  // sqrt(eps) = 0.1
    REQUIRE(v.size() == 1);
    CHECK(v.front().rfind("symmetry", 0) == 0);
}

TEST_CASE("noisy relations stay within bounds") {
    Strategy s = densify(depolarize(honest_strategy(2), {NoiseSpec::Kind::depolarizing, 0.05}));
    QuestionSet sp = make_set(5, 2, {{4, 3}});
    const double eps = full_audit(s, sp).epsilon;
    RelationReport r = relation_check(s, sp, {4, 3});
    CHECK(r.eta > 0.0);
    CHECK(relation_violations(r, eps).empty());
    for (const auto& [k, v] : global_conj_check(s)) CHECK(v <= kGlobalConjFactor * r.eta + 1e-9);
    CHECK_THROWS(global_conj_check(honest_strategy(1)));
}

TEST_CASE("honest extraction at n=1") {
    Strategy s = honest_strategy(1);
    QuestionSet sp = make_set(5, 1, {{3}});
    IsometryResult r = apply_isometry(s, sp, {3});
    CHECK(r.extracted_state_distance < 1e-9);
    CHECK(r.observable_distances.size() == 5);
    for (const auto& [k, v] : r.observable_distances) CHECK(v < 1e-9);
    for (const auto& [k, v] : r.linear_distances) CHECK(v < 1e-9);
    CHECK(r.product_distances.size() == 2);
    CHECK(r.junk_weights[0] == doctest::Approx(1.0));
    CHECK(r.junk_weights[1] == doctest::Approx(0.0));
    Vec e0 = Vec::Zero(r.junk_plus.size());
    e0(0) = 1.0;
    CHECK((r.junk_plus - e0).norm() < 1e-9);
}

TEST_CASE("conjugated honest extraction lands on the other branch") {
    Strategy s = conjugate(densify(honest_strategy(2)));
    QuestionSet sp = make_set(5, 2, {{2, 3}});
    IsometryResult r = apply_isometry(s, sp, {2, 3});
    CHECK(r.junk_weights[0] == doctest::Approx(0.0));
    CHECK(r.junk_weights[1] == doctest::Approx(1.0));
    CHECK(r.extracted_state_distance < 1e-9);
    for (const auto& [k, v] : r.observable_distances) CHECK(v < 1e-9);
    for (const auto& [k, v] : r.product_distances) CHECK(v < 1e-9);
}

TEST_CASE("product action") {
    Strategy s = honest_strategy(2);
    QuestionSet sp = make_set(5, 2, {{1, 3}});
    auto r = product_action_check(s, sp, {1, 3}, {{1, 2}, {2, 5}});
    CHECK(r.distance < 1e-9);
    CHECK(r.bound < 1e-8);
    CHECK_THROWS(product_action_check(s, sp, {1, 3}, {{1, 2}, {1, 3}}));

    Strategy noisy = depolarize(s, {NoiseSpec::Kind::depolarizing, 0.02});
    auto n = product_action_check(noisy, sp, {1, 3}, {{1, 1}, {2, 3}});
    CHECK(n.distance > 0.0);
    CHECK(n.distance <= n.bound + 1e-9);
}

TEST_CASE("V_B does not see Alice") {
    Strategy s = densify(honest_strategy(2));
    QuestionSet sp = make_set(5, 2, {{1, 3}, {2, 5}});
    auto f1 = apply_isometry(s, sp, {1, 3}).vb_fingerprint;
    auto f2 = apply_isometry(s, sp, {2, 5}).vb_fingerprint;
    auto f3 = apply_isometry(perturb_alice(s, 0.3), sp, {1, 3}).vb_fingerprint;
    CHECK(f1 == f2);
    CHECK(f1 == f3);
    CHECK(matrix_fingerprint(bob_isometry(s)) == f1);
}

TEST_CASE("dense cap") {
    Strategy s = densify(honest_strategy(6));
    QuestionSet sp = make_set(5, 6, {{1, 1, 1, 1, 1, 1}});
    CHECK_THROWS_AS(apply_isometry(s, sp, {1, 1, 1, 1, 1, 1}), std::invalid_argument);
}

TEST_CASE("reference vector layout") {
    Vec xi0 = Vec::Ones(1), xi1 = Vec::Zero(1);
    Vec r = reference_vector(1, xi0, xi1, {Mat()}, {1.0, 1.0});
    // Phi+ on (A', B') with both flags 0: indices 0000 and 1100
    CHECK(r.size() == 16);
    CHECK(std::abs(r(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(r(12) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(bits_string(5, 4) == "0101");
}
