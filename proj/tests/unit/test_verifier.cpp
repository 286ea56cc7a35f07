#include "bellforge/verifier.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace bellforge;

namespace {

const double r2 = 1.0 / std::numbers::sqrt2;

struct Term {
    int q, y, sign;
};
const Term kTerms[] = {{3, 1, 1}, {3, 2, 1}, {1, 1, 1}, {1, 2, -1}, {3, 3, 1}, {3, 4, 1},
                       {2, 3, 1}, {2, 4, -1}, {1, 5, 1}, {1, 6, 1}, {2, 5, 1}, {2, 6, -1}};

// <Phi+| A (x) B |Phi+> = tr(A B^T) / 2
double phi_corr(const Mat& a, const Mat& b) { return (a * b.transpose()).trace().real() / 2.0; }

Mat bob_by_hand(int y) {
    Mat x = pauli(kX), yy = pauli(kY), z = pauli(kZ);
    Mat all[6] = {r2 * (z + x), r2 * (z - x), r2 * (z + yy), r2 * (z - yy), r2 * (x + yy), r2 * (x - yy)};
    return all[y - 1];
}

}  // namespace

TEST_CASE("honest triple CHSH at n=1 against a hand oracle") {
    Mat alice[3] = {pauli(kX), -pauli(kY), pauli(kZ)};
    double oracle = 0.0;
    for (const auto& t : kTerms) oracle += t.sign * phi_corr(alice[t.q - 1], bob_by_hand(t.y));
    CHECK(oracle == doctest::Approx(6.0 * std::numbers::sqrt2));
    Strategy s = honest_strategy(1);
    QuestionSet sp = make_set(5, 1, {{2}});
    CHECK(triple_chsh_value(s, sp, 1, {}) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(triple_chsh_value(s, sp, 1, {}, EvalPath::dense) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("membership is enforced") {
    Strategy s = honest_strategy(3);
    QuestionSet sp = make_set(5, 3, {{1, 1, 1}});
    CHECK_THROWS(perfect_corr_value(s, sp, 1, {2, 2, 2}, 4));
    CHECK_THROWS(triple_chsh_value(s, sp, 1, {3, 3}));
    CHECK_NOTHROW(triple_chsh_value(s, sp, 1, {1, 3}));
}

TEST_CASE("honest audit is saturated") {
    Strategy s = honest_strategy(3);
    QuestionSet sp = make_set(5, 3, {{1, 3, 5}, {3, 3, 2}});
    AuditReport r = full_audit(s, sp);
    CHECK(r.epsilon <= 1e-9);
    for (const auto& [k, v] : r.triple_chsh) CHECK(v.value == doctest::Approx(kTripleChshMax).epsilon(1e-12));
    for (const auto& [k, v] : r.perfect_corr) CHECK(v.value == doctest::Approx(1.0));
    for (const auto& [k, v] : r.conj_corr) CHECK(v.value == doctest::Approx(1.0));
    CHECK(r.conj_corr.size() == 2 * 3);
    CHECK(r.correlator_count <= correlator_bound(5, 3, 2));
}

TEST_CASE("epsilon combines deficits") {
    CHECK(epsilon_from_deficits(0.0, 0.0, 0.0) == 0.0);
    CHECK(epsilon_from_deficits(0.1, 0.0, 0.0) == doctest::Approx(0.1 * std::numbers::sqrt2));
    CHECK(epsilon_from_deficits(0.0, 0.3, 0.1) == doctest::Approx(0.3));
    CHECK(epsilon_from_deficits(0.0, 0.1, 0.2) == doctest::Approx(0.4));
    CHECK(correlator_bound(5, 1, 1) == 12 * 5 + 2);
}

TEST_CASE("depolarized audit deficit is linear in p") {
    const double p = 0.05;
    Strategy s = depolarize(honest_strategy(2), {NoiseSpec::Kind::depolarizing, p});
    AuditReport r = full_audit(s, make_set(5, 2, {{1, 2}}));
    CHECK(r.chsh_deficit == doctest::Approx(p * kTripleChshMax));
    CHECK(r.perfect_deficit == doctest::Approx(p));
    CHECK(r.epsilon == doctest::Approx(12.0 * p));
}

TEST_CASE("sum of squares identity on random involutions") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        PairObservables o;
        for (auto& a : o.alice) a = random_involution(3, rng);
        for (auto& b : o.bob) b = random_involution(2, rng);
        Mat lhs = kTripleChshMax * identity(6) - triple_chsh_operator(o);
        CHECK(operator_norm(lhs - sos_operator(o)) <= 1e-9);
        Mat acc = Mat::Zero(6, 6);
        for (const auto& f : sos_terms(o)) acc += f.adjoint() * f;
        CHECK((acc - sos_operator(o)).norm() < 1e-9);
    }
}

TEST_CASE("sos residuals bound the deficit") {
    Strategy h = honest_strategy(1);
    QuestionSet sp = make_set(5, 1, {{1}});
    for (double r : sos_residuals(h, sp, 1, {})) CHECK(r < 1e-9);
    Strategy s = depolarize(h, {NoiseSpec::Kind::depolarizing, 0.1});
    const double deficit = kTripleChshMax - triple_chsh_value(s, sp, 1, {});
    double sq = 0.0;
    for (double r : sos_residuals(s, sp, 1, {})) sq += r * r;
    CHECK(sq == doctest::Approx(deficit));
}

TEST_CASE("Hoeffding radius") {
    CHECK(hoeffding_radius(1000, 0.05) == doctest::Approx(std::sqrt(2.0 * std::log(40.0) / 1000.0)));
    CHECK(std::isinf(hoeffding_radius(0, 0.05)));
    CHECK_THROWS(hoeffding_radius(10, 1.0));
}

TEST_CASE("CSV lines round trip") {
    TrialRecord r{42, {1, 3}, kLozenge, {1, -1}, {3}};
    std::string line = trial_csv_line(r);
    CHECK(line == "42,13,L,+-,3");
    TrialRecord back = parse_trial_csv_line(line);
    CHECK(back.round == 42);
    CHECK(back.x == r.x);
    CHECK(back.y == r.y);
    CHECK(back.a == r.a);
    CHECK(back.b == r.b);
    TrialRecord s{7, {2}, 5, {-1}, {1}};
    CHECK(trial_csv_line(s) == "7,2,5,-,+");
    CHECK_THROWS(parse_trial_csv_line("1,2,3"));
}

TEST_CASE("tally and record paths give the same estimate") {
    Strategy s = honest_strategy(2);
    QuestionSet sp = make_set(5, 2, {{3, 1}});
    TrialTally t = simulate_tally(s, sp, 200, 99);
    std::vector<TrialRecord> recs;
    simulate_records(s, sp, 200, 99, [&](const TrialRecord& r) { recs.push_back(r); });
    CHECK(recs.size() == 200 * requested_cells(sp).size());
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].round == recs[i - 1].round + 1);
    AuditReport a = estimate_from_trials(t, sp, 0.01);
    AuditReport b = estimate_from_trials(recs, sp, 0.01);
    CHECK(a.statistical);
    CHECK(a.epsilon == b.epsilon);
    CHECK(a.epsilon_lower == b.epsilon_lower);
    for (const auto& [k, v] : a.triple_chsh) {
        CHECK(b.triple_chsh.at(k).value == v.value);
        CHECK(v.radius == doctest::Approx(12.0 * hoeffding_radius(200, 0.01)));
    }
    // honest answers agree perfectly where they must
    for (const auto& [k, v] : a.perfect_corr) CHECK(v.value == 1.0);
    for (const auto& [k, v] : a.conj_corr) CHECK(v.value == 1.0);
}

TEST_CASE("missing cells are reported") {
    Strategy s = honest_strategy(2);
    QuestionSet sp = make_set(5, 2, {{3, 1}});
    std::vector<TrialRecord> recs;
    simulate_records(s, sp, 5, 1, [&](const TrialRecord& r) {
        if (r.y != kLozenge) recs.push_back(r);
    });
    try {
        estimate_from_trials(recs, sp, 0.01);
        FAIL("expected MissingCellsError");
    } catch (const MissingCellsError& e) {
        CHECK(e.cells().size() == 3);
        for (const auto& c : e.cells()) CHECK(c.second == kLozenge);
    }
}
