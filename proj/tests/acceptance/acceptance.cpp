// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include "bellforge/prepare.hpp"
#include "bellforge/selftest.hpp"
#include "bellforge/util.hpp"
#include "bellforge/verifier.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace bellforge;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

QuestionSet specials_for(int n, std::size_t count, std::uint64_t tag) {
    auto rng = substream(2024, "acceptance-specials", tag * 16 + static_cast<std::uint64_t>(n));
    return random_specials(n, count, 0.0, rng);
}

// 1/2 ||uu* - vv*||_1 via the 2x2 Gram determinant
double gram_trace_distance(const Vec& u, const Vec& v) {
    const double a = u.squaredNorm(), b = v.squaredNorm();
    return 0.5 * std::sqrt(std::max(0.0, (a + b) * (a + b) - 4.0 * std::norm(u.dot(v))));
}

Strategy all_identity_strategy() {
    auto d = std::make_shared<DenseModel>();
    d->dA = d->dB = 2;
    d->layout.parts = {{"A", 2, Role::alice}, {"B", 2, Role::bob}};
    d->psi = Vec::Zero(4);
    d->psi(0) = 1.0;
    Family plus{identity(2), Mat::Zero(2, 2)};
    for (int q = 1; q <= 5; ++q) d->alice[Question{q}] = plus;
    for (int y = 1; y <= 6; ++y) d->bob[y - 1] = plus;
    d->lozenge = {identity(2)};
    d->filled = {identity(2)};
    Strategy s;
    s.n = 1;
    s.dense = d;
    s.validate();
    return s;
}

Outcome honest_saturation() {
    const auto t0 = Clock::now();
    double worst_chsh = 0.0, worst_corr = 0.0, worst_eps = 0.0;
    for (int n = 1; n <= 3; ++n)
        for (std::size_t count : {1, 2}) {
            QuestionSet sp = specials_for(n, count, 1);
            AuditReport r = full_audit(honest_strategy(n), sp);
            for (const auto& [k, v] : r.triple_chsh) worst_chsh = std::max(worst_chsh, std::abs(v.value - kTripleChshMax));
            for (const auto& [k, v] : r.perfect_corr) worst_corr = std::max(worst_corr, std::abs(v.value - 1.0));
            for (const auto& [k, v] : r.conj_corr) worst_corr = std::max(worst_corr, std::abs(v.value - 1.0));
            worst_eps = std::max(worst_eps, r.epsilon);
        }
    const double secs = seconds_since(t0);
    bool ok = worst_chsh <= 1e-9 && worst_corr <= 1e-9 && worst_eps <= 1e-9 && secs < 10.0;
    return {ok, "max |chsh - 6sqrt2| " + fmt(worst_chsh) + ", max |corr - 1| " + fmt(worst_corr) + ", max eps " +
                    fmt(worst_eps) + ", runtime " + fmt(secs) + "s"};
}

Outcome sos_identity() {
    auto rng = substream(2024, "acceptance-sos");
    const std::size_t dims[] = {2, 3, 4};
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t da = dims[rng() % 3], db = dims[rng() % 3];
        PairObservables o;
        for (auto& a : o.alice) a = random_involution(da, rng);
        for (auto& b : o.bob) b = random_involution(db, rng);
        Mat lhs = kTripleChshMax * identity(da * db) - triple_chsh_operator(o);
        worst = std::max(worst, operator_norm(lhs - sos_operator(o)));
    }
    return {worst <= 1e-9, "100 sets, max operator-norm gap " + fmt(worst)};
}

Outcome quantum_bound() {
    auto rng = substream(2024, "acceptance-bound");
    QuestionSet sp = make_set(5, 1, {{1}});
    double best = -1e9;
    for (int t = 0; t < 100; ++t) best = std::max(best, triple_chsh_value(random_pair_strategy(rng), sp, 1, {}));
    const double det = triple_chsh_value(all_identity_strategy(), sp, 1, {});
    bool ok = best <= kTripleChshMax + 1e-7 && std::abs(det - 6.0) <= 1e-12;
    return {ok, "max random value " + fmt(best) + " vs 6sqrt2 = " + fmt(kTripleChshMax) + ", deterministic " + fmt(det)};
}

Outcome relation_constants() {
    const auto t0 = Clock::now();
    QuestionSet sp = specials_for(2, 2, 4);
    std::size_t checked = 0, bad = 0;
    double worst_ratio = 0.0;
    for (double p : {0.01, 0.05, 0.1}) {
        Strategy s = densify(depolarize(honest_strategy(2), {NoiseSpec::Kind::depolarizing, p}));
        const double eps = full_audit(s, sp).epsilon;
        const double se = std::sqrt(eps);
        double eta = 0.0;
        for (const auto& chi : sp.members) {
            RelationReport r = relation_check(s, sp, chi);
            eta = std::max(eta, r.eta);
            bad += relation_violations(r, eps, 1e-9).size();
            checked += r.symmetry.size() + r.comm_bob.size() + r.comm_alice.size() + r.acomm_alice.size() +
                       r.acomm_bob.size() + r.conj.size();
            for (const auto& [k, v] : r.symmetry) worst_ratio = std::max(worst_ratio, v / (symmetry_bound_factor() * se));
            for (const auto& [k, v] : r.conj) worst_ratio = std::max(worst_ratio, v / (conj_bound_factor() * se));
        }
        for (const auto& [k, v] : global_conj_check(s)) {
            ++checked;
            if (v > kGlobalConjFactor * eta + 1e-9) ++bad;
        }
    }
    const double secs = seconds_since(t0);
    return {bad == 0 && secs < 60.0, std::to_string(checked) + " residuals, " + std::to_string(bad) +
                                         " above bound, worst symmetry/conj ratio " + fmt(worst_ratio) + ", runtime " +
                                         fmt(secs) + "s"};
}

Outcome selftest_exactness() {
    double worst = 0.0, junk = 0.0;
    std::size_t count = 0;
    for (int n = 1; n <= 3; ++n) {
        QuestionSet sp = specials_for(n, 2, 5);
        for (const auto& chi : sp.members) {
            IsometryResult r = apply_isometry(honest_strategy(n), sp, chi);
            worst = std::max(worst, r.extracted_state_distance);
            for (const auto& [k, v] : r.observable_distances) worst = std::max(worst, v);
            for (const auto& [k, v] : r.product_distances) worst = std::max(worst, v);
            count += 1 + r.observable_distances.size() + r.product_distances.size();
            junk = std::max({junk, std::abs(r.junk_weights[0] - 1.0), std::abs(r.junk_weights[1])});
            Vec e0 = Vec::Zero(r.junk_plus.size());
            e0(0) = 1.0;
            junk = std::max(junk, (r.junk_plus - e0).norm());
        }
    }
    return {worst <= 1e-9 && junk <= 1e-9,
            std::to_string(count) + " distances, max " + fmt(worst) + ", junk deviation " + fmt(junk)};
}

Outcome vb_independence() {
    std::set<std::uint64_t> prints;
    std::size_t runs = 0;
    for (int n : {2, 3}) {
        prints.clear();
        QuestionSet sp = specials_for(n, 4, 6);
        Strategy s = densify(honest_strategy(n));
        std::vector<Strategy> bases{s};
        // purified noise at n=3 exceeds the dense cap
        if (n == 2) bases.push_back(densify(depolarize(honest_strategy(n), {NoiseSpec::Kind::depolarizing, 0.03})));
        for (const auto& base : bases) {
            std::set<std::uint64_t> local;
            for (const auto& chi : sp.members) {
                local.insert(apply_isometry(base, sp, chi).vb_fingerprint);
                ++runs;
            }
            for (double angle : {0.2, 1.1}) {
                local.insert(apply_isometry(perturb_alice(base, angle), sp, sp.members.front()).vb_fingerprint);
                ++runs;
            }
            if (local.size() != 1)
                return {false, "n=" + std::to_string(n) + " produced " + std::to_string(local.size()) + " fingerprints"};
        }
    }
    return {true, std::to_string(runs) + " isometries over 4 chi and 2 Alice perturbations, one fingerprint per strategy"};
}

Outcome state_preparation() {
    double worst_d = 0.0, worst_p = 0.0, worst_conj = 0.0, beta_swap = 0.0;
    for (int n = 1; n <= 3; ++n) {
        QuestionSet sp = specials_for(n, 2, 7);
        Strategy h = densify(honest_strategy(n));
        Strategy c = conjugate(h);
        for (const auto& chi : sp.members) {
            PrepReport r = prep_distance_report(h, sp, chi);
            for (const auto& row : r.per_outcome) {
                worst_d = std::max(worst_d, row.D);
                worst_p = std::max(worst_p, std::abs(row.p - std::pow(0.5, n)));
            }
            PrepReport rc = prep_distance_report(c, sp, chi);
            for (const auto& row : rc.per_outcome) worst_conj = std::max(worst_conj, row.D);
            beta_swap = std::max({beta_swap, std::abs(rc.beta0_trace), std::abs(rc.beta1_trace - 1.0)});
        }
    }
    bool ok = worst_d <= 1e-9 && worst_p <= 1e-9 && worst_conj <= 1e-9 && beta_swap <= 1e-9;
    return {ok, "max D " + fmt(worst_d) + ", max |p - 2^-n| " + fmt(worst_p) + ", conjugated max D " + fmt(worst_conj) +
                    ", beta swap deviation " + fmt(beta_swap)};
}

Outcome robustness_lemmas() {
    auto rng = substream(2024, "acceptance-lemmas");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t td_bad = 0, se_bad = 0, oracle_gap = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 2 + rng() % 7;
        Vec u = random_state(d, rng), v = random_state(d, rng);
        if (t % 2) v = (u + 0.2 * unit(rng) * v).normalized();
        const double td_unit = gram_trace_distance(u, v);
        if (td_unit > (u - v).norm() + 1e-12) ++td_bad;
        if (std::abs(projector_trace_distance(u, v) - td_unit) > 1e-9) ++oracle_gap;
        Vec su = unit(rng) * u, sv = unit(rng) * v;
        const double td_sub = gram_trace_distance(su, sv);
        if (td_sub > 2.0 * (su - sv).norm() + 1e-12) ++td_bad;
        if (std::abs(projector_trace_distance(su, sv) - td_sub) > 1e-9) ++oracle_gap;
    }
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 2 + rng() % 7;
        Vec phi = random_state(d, rng), chi = random_state(d, rng);
        if (t % 2) chi = (phi + 0.3 * unit(rng) * chi).normalized();
        const double e = 2.0 * unit(rng);
        const double re = phi.dot(chi).real();
        const double dist = (phi - chi).norm();
        if (std::abs(re - (1.0 - e)) < 1e-12) continue;
        const bool left = re >= 1.0 - e;
        const bool right = dist <= std::sqrt(2.0 * e);
        if (left != right) ++se_bad;
    }

    auto frng = substream(2024, "synthetic");
    std::size_t rp_bad = 0, hyp_bad = 0;
    for (int t = 0; t < 1000; ++t) {
        SyntheticFamily f = random_family(frng);
        RobustProbResult r = robust_prob_oracle(f, family_delta(f), 2.0 / 3.0);
        if (!r.hypothesis_ok) ++hyp_bad;
        if (!r.holds) ++rp_bad;
    }

    std::size_t measured_bad = 0;
    std::ostringstream measured;
    QuestionSet sp = specials_for(2, 2, 8);
    for (double p : {0.002, 0.02}) {
        Strategy s = densify(depolarize(honest_strategy(2), {NoiseSpec::Kind::depolarizing, p}));
        for (const auto& chi : sp.members) {
            PrepReport r = prep_distance_report(s, sp, chi);
            if (r.full_exceed_probability > r.full_bound + 1e-12) ++measured_bad;
            if (r.exceed_probability > r.bound + 1e-12) ++measured_bad;
            measured << " p=" << p << ":" << fmt(r.delta_avg) << "/" << fmt(r.full_exceed_probability);
        }
    }
    bool ok = td_bad == 0 && se_bad == 0 && oracle_gap == 0 && rp_bad == 0 && hyp_bad == 0 && measured_bad == 0;
    std::ostringstream os;
    os << "trace_dist_bound violations " << td_bad << " (oracle gaps " << oracle_gap << "), state_estimate mismatches "
       << se_bad << ", robust_prob violations " << rp_bad << "/1000 (hypothesis failures " << hyp_bad
       << "), measured-distance check failures " << measured_bad << " [delta/exceed" << measured.str() << "]";
    return {ok, os.str()};
}

Outcome question_lemmas() {
    const int m = 5;
    std::size_t checks = 0, bad = 0;
    auto all_strings = [&](int n) {
        std::vector<Question> out;
        std::size_t total = 1;
        for (int i = 0; i < n; ++i) total *= m;
        for (std::size_t c = 0; c < total; ++c) {
            Question q(n);
            std::size_t v = c;
            for (int i = n - 1; i >= 0; --i) {
                q[i] = static_cast<int>(v % m) + 1;
                v /= m;
            }
            out.push_back(q);
        }
        return out;
    };
    auto expect = [&](bool cond) {
        ++checks;
        if (!cond) ++bad;
    };
    for (int n = 1; n <= 4; ++n) {
        const std::size_t dsize = 1 + 4 * n + 8 * n * (n - 1);
        for (const auto& chi : all_strings(n)) {
            QuestionSet sp = make_set(m, n, {chi});
            QuestionSet xchi = expand_special(chi, m);
            expect(xchi.size() == dsize && base_set_bound(m, n) == dsize);
            for (int i = 1; i <= n; ++i)
                for (int q = 1; q <= m; ++q) expect(xchi.contains(with_position(chi, i, q)));
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    for (int q = 1; q <= m; ++q)
                        for (int r = 1; r <= m; ++r) {
                            Question x = with_position(with_position(chi, i, q), j, r);
                            expect(xchi.contains(x));
                            expect(reduced_set(sp, i).contains(drop_position(x, i)));
                            expect(reduced_set(sp, j).contains(drop_position(x, j)));
                        }
            std::set<Question> un;
            for (int j = 1; j <= n; ++j) {
                QuestionSet r = reduced_set(sp, j);
                expect(r.size() <= reduced_set_bound(m, n));
                for (const auto& q : position_set(sp, j).members) un.insert(q);
            }
            expect(un == std::set<Question>(xchi.members.begin(), xchi.members.end()));
        }
        // multi-element special sets
        auto rng = substream(2024, "acceptance-questions", static_cast<std::uint64_t>(n));
        for (int t = 0; t < 40; ++t) {
            const std::size_t cap = n == 1 ? 5 : 4;
            QuestionSet sp = random_specials(n, 1 + rng() % cap, 0.0, rng);
            QuestionSet all = build_question_set(sp);
            expect(all.size() <= sp.size() * base_set_bound(m, n));
            std::set<Question> un;
            std::size_t chsh_terms = 0;
            for (int j = 1; j <= n; ++j) {
                QuestionSet r = reduced_set(sp, j);
                expect(r.size() <= sp.size() * reduced_set_bound(m, n));
                chsh_terms += 12 * r.size();
                for (const auto& q : position_set(sp, j).members) un.insert(q);
            }
            expect(un == std::set<Question>(all.members.begin(), all.members.end()));
            expect(chsh_terms <= 12 * static_cast<std::size_t>(n) * (1 + 4 * n) * sp.size());
            if (n <= 3) {
                AuditReport a = full_audit(honest_strategy(n), sp);
                expect(a.triple_chsh.size() * 12 == chsh_terms);
                expect(a.correlator_count <= correlator_bound(m, n, sp.size()));
            }
        }
    }
    return {bad == 0, std::to_string(checks) + " checks over m=5, n<=4, " + std::to_string(bad) + " failures"};
}

Outcome statistical_path() {
    const std::uint64_t trials = 100000;
    const double alpha = 0.01;
    QuestionSet sp = specials_for(2, 1, 10);
    Strategy s = honest_strategy(2);
    AuditReport exact = full_audit(s, sp);
    TrialTally t1 = simulate_tally(s, sp, trials, 77);
    AuditReport est = estimate_from_trials(t1, sp, alpha);
    std::size_t cells = 0, outside = 0;
    double worst = 0.0;
    auto compare = [&](const std::map<CellKey, AuditValue>& ex, const std::map<CellKey, AuditValue>& es) {
        for (const auto& [k, v] : ex) {
            const auto& e = es.at(k);
            ++cells;
            const double ratio = std::abs(e.value - v.value) / e.radius;
            worst = std::max(worst, ratio);
            if (ratio > 3.0) ++outside;
        }
    };
    compare(exact.triple_chsh, est.triple_chsh);
    compare(exact.perfect_corr, est.perfect_corr);
    compare(exact.conj_corr, est.conj_corr);

    // replay with a different worker count must give the same tallies
    const char* old = std::getenv("BELLFORGE_THREADS");
    std::string saved = old ? old : "";
    setenv("BELLFORGE_THREADS", "3", 1);
    TrialTally t2 = simulate_tally(s, sp, trials, 77);
    if (old)
        setenv("BELLFORGE_THREADS", saved.c_str(), 1);
    else
        unsetenv("BELLFORGE_THREADS");
    bool same = t1.cells.size() == t2.cells.size();
    for (const auto& [cell, a] : t1.cells) {
        const auto& b = t2.cells.at(cell);
        same = same && a.trials == b.trials && a.agree == b.agree && a.bell == b.bell;
    }
    AuditReport est2 = estimate_from_trials(t2, sp, alpha);
    same = same && est2.epsilon == est.epsilon && est2.epsilon_lower == est.epsilon_lower;
    std::ostringstream os;
    os << cells << " correlators from " << t1.cells.size() << " cells x " << trials << " trials, " << outside
       << " outside 3 radii (worst " << fmt(worst) << " radii), replay " << (same ? "bit-identical" : "DIFFERS");
    return {outside == 0 && same, os.str()};
}

}  // namespace

int main() {
    report(1, "honest saturation", honest_saturation);
    report(2, "SOS operator identity", sos_identity);
    report(3, "quantum bound", quantum_bound);
    report(4, "relation constants on noisy strategies", relation_constants);
    report(5, "self-test exactness", selftest_exactness);
    report(6, "V_B independence", vb_independence);
    report(7, "state preparation", state_preparation);
    report(8, "robustness lemmas", robustness_lemmas);
    report(9, "question-set lemmas", question_lemmas);
    report(10, "statistical path", statistical_path);
    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
