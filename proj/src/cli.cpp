#include "bellforge/cli.hpp"

#include "bellforge/util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bellforge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kGateFailed = 1, kBadInput = 2, kRuntime = 3 };

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + p.string());
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json finite(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

json cells_json(const std::map<CellKey, AuditValue>& m, bool with_radius) {
    json arr = json::array();
    for (const auto& [k, v] : m) {
        json row{{"j", std::get<0>(k)}, {"x", to_string(std::get<1>(k))}, {"tag", std::get<2>(k)}, {"value", v.value}};
        if (with_radius) row["radius"] = finite(v.radius);
        arr.push_back(std::move(row));
    }
    return arr;
}

std::vector<Question> chosen_chis(const RunConfig& cfg, const QuestionSet& specials) {
    if (cfg.chi.empty()) return specials.members;
    std::vector<Question> out;
    for (const auto& c : cfg.chi) {
        Question q = parse_question(c);
        if (!specials.contains(q)) throw std::invalid_argument("chi " + c + " is not among the special questions");
        out.push_back(q);
    }
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (m < 2 || m > 9) throw std::invalid_argument("m must lie in 2..9");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
    if (noise.p < 0.0 || noise.p > 1.0) throw std::invalid_argument("noise p must lie in [0,1]");
    if (min_z_fraction < 0.0 || min_z_fraction > 1.0) throw std::invalid_argument("min_z_fraction must lie in [0,1]");
    if (specials.empty() && specials_count == 0) throw std::invalid_argument("need at least one special question");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
}

RunConfig config_from_json(const json& j, RunConfig cfg) {
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) j.at(key).get_to(dst);
    };
    get("n", cfg.n);
    get("m", cfg.m);
    get("seed", cfg.seed);
    get("trials", cfg.trials);
    get("alpha", cfg.alpha);
    get("tolerance", cfg.tolerance);
    get("strategy", cfg.strategy);
    get("out", cfg.out);
    get("conjugate", cfg.conjugate);
    get("chi", cfg.chi);
    get("families", cfg.families);
    get("vector_pairs", cfg.vector_pairs);
    get("c", cfg.c);
    get("write_trials", cfg.write_trials);
    if (j.contains("gate")) cfg.gate = j.at("gate").get<double>();
    if (j.contains("threshold")) cfg.threshold = j.at("threshold").get<double>();
    if (j.contains("prep_bound")) cfg.prep_bound = j.at("prep_bound").get<double>();
    if (j.contains("specials")) {
        const auto& sp = j.at("specials");
        if (sp.is_array()) {
            cfg.specials = sp.get<std::vector<std::string>>();
        } else {
            if (sp.contains("count")) sp.at("count").get_to(cfg.specials_count);
            if (sp.contains("min_z_fraction")) sp.at("min_z_fraction").get_to(cfg.min_z_fraction);
            if (sp.contains("seed")) sp.at("seed").get_to(cfg.seed);
        }
    }
    if (j.contains("noise")) {
        const auto& nz = j.at("noise");
        std::string kind = nz.value("kind", std::string("depolarizing"));
        if (kind == "none") {
            cfg.noise = {};
        } else if (kind == "depolarizing") {
            cfg.noise.kind = NoiseSpec::Kind::depolarizing;
            cfg.noise.p = nz.value("p", 0.0);
        } else {
            throw std::invalid_argument("unknown noise kind '" + kind + "'");
        }
    }
    return cfg;
}

QuestionSet resolve_specials(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.specials.empty()) {
        auto rng = substream(cfg.seed, "questions");
        return random_specials(cfg.n, cfg.specials_count, cfg.min_z_fraction, rng, cfg.m);
    }
    std::vector<Question> items;
    std::set<Question> seen;
    for (const auto& text : cfg.specials) {
        Question q = parse_question(text);
        if (static_cast<int>(q.size()) != cfg.n)
            throw std::invalid_argument("special question '" + text + "' does not have length " + std::to_string(cfg.n));
        for (int v : q)
            if (v > cfg.m) throw std::invalid_argument("special question '" + text + "' uses a symbol above m");
        if (!seen.insert(q).second) {
            warnings.push_back("duplicate special question '" + text + "' dropped");
            continue;
        }
        items.push_back(q);
    }
    return make_set(cfg.m, cfg.n, std::move(items));
}

Strategy resolve_strategy(const RunConfig& cfg) {
    Strategy s = cfg.strategy.empty() ? honest_strategy(cfg.n) : load_strategy(cfg.strategy);
    if (s.n != cfg.n)
        throw std::invalid_argument("strategy has n=" + std::to_string(s.n) + " but the config asks for n=" +
                                    std::to_string(cfg.n));
    if (cfg.noise.kind != NoiseSpec::Kind::none && cfg.noise.p > 0.0) s = depolarize(s, cfg.noise);
    if (cfg.conjugate) s = conjugate(s);
    s.validate();
    return s;
}

json to_json(const AuditReport& r) {
    json j;
    j["n"] = r.n;
    j["specials"] = r.specials;
    j["triple_chsh"] = cells_json(r.triple_chsh, r.statistical);
    j["perfect_corr"] = cells_json(r.perfect_corr, r.statistical);
    j["conj_corr"] = cells_json(r.conj_corr, r.statistical);
    j["deficits"] = {{"triple_chsh", r.chsh_deficit}, {"perfect", r.perfect_deficit}, {"conj", r.conj_deficit}};
    j["epsilon"] = r.epsilon;
    j["statistical"] = r.statistical;
    if (r.statistical) {
        j["epsilon_lower"] = r.epsilon_lower;
        j["alpha"] = r.alpha;
    }
    j["correlator_count"] = r.correlator_count;
    return j;
}

json to_json(const RelationReport& r, double epsilon) {
    const double se = std::sqrt(std::max(0.0, epsilon));
    json j;
    j["chi"] = to_string(r.chi);
    auto family = [&](const auto& m, auto key_fn, auto bound_fn) {
        json arr = json::array();
        for (const auto& [k, v] : m) {
            json row = key_fn(k);
            row["residual"] = v;
            row["bound"] = bound_fn(k) * se;
            arr.push_back(std::move(row));
        }
        return arr;
    };
    j["symmetry"] = family(
        r.symmetry, [](const auto& k) { return json{{"j", k.first}, {"q", k.second}}; },
        [](const auto&) { return symmetry_bound_factor(); });
    auto quad = [](const std::tuple<int, int, int, int>& k) {
        return json{{"j", std::get<0>(k)}, {"k", std::get<1>(k)}, {"q", std::get<2>(k)}, {"r", std::get<3>(k)}};
    };
    auto tri = [](const std::tuple<int, int, int>& k) {
        return json{{"j", std::get<0>(k)}, {"q", std::get<1>(k)}, {"r", std::get<2>(k)}};
    };
    j["comm_bob"] = family(r.comm_bob, quad, [](const auto&) { return comm_bob_bound_factor(); });
    j["comm_alice"] = family(r.comm_alice, quad, [](const auto&) { return comm_alice_bound_factor(); });
    j["acomm_alice"] = family(r.acomm_alice, tri, [](const auto&) { return acomm_alice_bound_factor(); });
    j["acomm_bob"] = family(r.acomm_bob, tri, [](const std::tuple<int, int, int>& k) {
        return acomm_bob_bound_factor(std::get<1>(k), std::get<2>(k));
    });
    j["conj"] = family(
        r.conj, [](int k) { return json{{"j", k}}; }, [](int) { return conj_bound_factor(); });
    json extra = json::array();
    for (const auto& [k, v] : r.extra_linear) extra.push_back({{"j", k.first}, {"q", k.second}, {"residual", v}});
    j["extra_linear"] = extra;
    j["eta"] = r.eta;
    return j;
}

json to_json(const IsometryResult& r) {
    json j;
    j["chi"] = to_string(r.chi);
    j["state_distance"] = r.extracted_state_distance;
    json obs = json::array();
    for (const auto& [k, v] : r.observable_distances) obs.push_back({{"k", k.first}, {"q", k.second}, {"distance", v}});
    j["observable_distances"] = obs;
    json lin = json::array();
    for (const auto& [k, v] : r.linear_distances) lin.push_back({{"k", k.first}, {"q", k.second}, {"distance", v}});
    j["linear_distances"] = lin;
    json prod = json::object();
    for (const auto& [k, v] : r.product_distances) prod[k] = v;
    j["product_distances"] = prod;
    j["junk_weights"] = {r.junk_weights[0], r.junk_weights[1]};
    j["vb_fingerprint"] = hex64(r.vb_fingerprint);
    return j;
}

json to_json(const PrepReport& r) {
    json j;
    j["chi"] = to_string(r.chi);
    json rows = json::array();
    for (const auto& row : r.per_outcome) {
        json x{{"a", outcome_string(row.a)}, {"p", row.p}, {"excluded", row.excluded}};
        if (!row.excluded) {
            x["D"] = row.D;
            x["D_full"] = row.D_full;
        }
        rows.push_back(std::move(x));
    }
    j["per_outcome"] = rows;
    j["probability_sum"] = r.probability_sum;
    j["beta0_trace"] = r.beta0_trace;
    j["beta1_trace"] = r.beta1_trace;
    j["gamma"] = r.gamma;
    j["threshold"] = r.threshold;
    j["exceed_probability"] = r.exceed_probability;
    j["bound"] = r.bound;
    j["delta_avg"] = r.delta_avg;
    j["full_threshold"] = r.full_threshold;
    j["full_exceed_probability"] = r.full_exceed_probability;
    j["full_bound"] = r.full_bound;
    return j;
}

CommandResult cmd_gen_questions(const RunConfig& cfg) {
    cfg.validate();
    std::vector<std::string> warnings;
    QuestionSet specials = resolve_specials(cfg, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    QuestionSet all = build_question_set(specials);

    std::ostringstream sp, qs;
    for (const auto& q : specials.members) sp << to_string(q) << "\n";
    for (const auto& q : all.members) qs << to_string(q) << "\n";
    const fs::path out(cfg.out);
    write_text(out / "specials.txt", sp.str());
    write_text(out / "questions.txt", qs.str());

    json per_chi = json::object();
    for (const auto& chi : specials.members) per_chi[to_string(chi)] = expand_special(chi, cfg.m).size();
    json reduced = json::array();
    bool reduced_ok = true;
    for (int j = 1; j <= cfg.n; ++j) {
        const std::size_t size = reduced_set(specials, j).size();
        const std::size_t bound = specials.size() * reduced_set_bound(cfg.m, cfg.n);
        reduced_ok = reduced_ok && size <= bound;
        reduced.push_back({{"j", j}, {"size", size}, {"bound", bound}});
    }
    const std::size_t bound = specials.size() * base_set_bound(cfg.m, cfg.n);
    json rep;
    rep["n"] = cfg.n;
    rep["m"] = cfg.m;
    rep["seed"] = cfg.seed;
    rep["specials"] = specials.size();
    rep["questions"] = all.size();
    rep["per_special"] = per_chi;
    rep["question_bound"] = bound;
    rep["reduced_sets"] = reduced;
    rep["correlator_bound"] = correlator_bound(cfg.m, cfg.n, specials.size());
    rep["bound_ok"] = all.size() <= bound && reduced_ok;
    rep["warnings"] = warnings;
    write_json(out / "questions.json", rep);
    return {rep["bound_ok"].get<bool>() ? kPass : kGateFailed, rep};
}

CommandResult cmd_audit(const RunConfig& cfg) {
    cfg.validate();
    std::vector<std::string> warnings;
    QuestionSet specials = resolve_specials(cfg, warnings);
    Strategy s = resolve_strategy(cfg);
    const double gate = cfg.gate.value_or(cfg.tolerance);

    AuditReport exact = full_audit(s, specials);
    json rep;
    rep["exact"] = to_json(exact);
    rep["gate"] = gate;
    rep["seed"] = cfg.seed;
    rep["warnings"] = warnings;
    bool pass = exact.epsilon <= gate;
    if (cfg.trials > 0) {
        TrialTally tally = simulate_tally(s, specials, cfg.trials, cfg.seed);
        AuditReport est = estimate_from_trials(tally, specials, cfg.alpha);
        rep["sampled"] = to_json(est);
        rep["trials_per_cell"] = cfg.trials;
        pass = pass && est.epsilon_lower <= gate;
        if (cfg.write_trials) {
            std::ostringstream csv;
            csv << trial_csv_header() << "\n";
            simulate_records(s, specials, cfg.trials, cfg.seed,
                             [&](const TrialRecord& r) { csv << trial_csv_line(r) << "\n"; });
            write_text(fs::path(cfg.out) / "trials.csv", csv.str());
        }
    }
    rep["pass"] = pass;
    write_json(fs::path(cfg.out) / "audit.json", rep);
    return {pass ? kPass : kGateFailed, rep};
}

CommandResult cmd_selftest(const RunConfig& cfg) {
    cfg.validate();
    std::vector<std::string> warnings;
    QuestionSet specials = resolve_specials(cfg, warnings);
    Strategy s = densify(resolve_strategy(cfg));
    const double gate = cfg.gate.value_or(cfg.tolerance);
    const double slack = 1e-9;

    AuditReport audit = full_audit(s, specials);
    json rep;
    rep["epsilon"] = audit.epsilon;
    rep["gate"] = gate;
    rep["warnings"] = warnings;
    bool pass = true;
    double eta = 0.0, max_distance = 0.0;
    std::set<std::uint64_t> prints;
    json per = json::array();
    for (const auto& chi : chosen_chis(cfg, specials)) {
        RelationReport rel = relation_check(s, specials, chi);
        auto bad = relation_violations(rel, audit.epsilon, slack);
        IsometryResult iso = apply_isometry(s, specials, chi);
        eta = std::max(eta, rel.eta);
        prints.insert(iso.vb_fingerprint);
        max_distance = std::max(max_distance, iso.extracted_state_distance);
        for (const auto& [k, v] : iso.observable_distances) max_distance = std::max(max_distance, v);
        for (const auto& [k, v] : iso.product_distances) max_distance = std::max(max_distance, v);
        pass = pass && bad.empty();
        per.push_back({{"relations", to_json(rel, audit.epsilon)}, {"violations", bad}, {"isometry", to_json(iso)}});
    }
    rep["per_special"] = per;
    rep["eta"] = eta;
    if (s.n >= 2) {
        json gc = json::array();
        for (const auto& [k, v] : global_conj_check(s)) {
            const double bound = kGlobalConjFactor * eta;
            pass = pass && v <= bound + slack;
            gc.push_back({{"j", k.first}, {"sign", k.second}, {"residual", v}, {"bound", bound}});
        }
        rep["global_conj"] = gc;
    }
    json fp = json::array();
    for (auto f : prints) fp.push_back(hex64(f));
    rep["vb_fingerprints"] = fp;
    rep["vb_independent"] = prints.size() == 1;
    rep["max_distance"] = max_distance;
    pass = pass && prints.size() == 1 && max_distance <= gate;
    rep["pass"] = pass;
    write_json(fs::path(cfg.out) / "selftest.json", rep);
    return {pass ? kPass : kGateFailed, rep};
}

CommandResult cmd_prepare(const RunConfig& cfg) {
    cfg.validate();
    std::vector<std::string> warnings;
    QuestionSet specials = resolve_specials(cfg, warnings);
    Strategy s = densify(resolve_strategy(cfg));
    json rep;
    rep["warnings"] = warnings;
    json per = json::array();
    bool pass = true;
    for (const auto& chi : chosen_chis(cfg, specials)) {
        PrepReport pr = prep_distance_report(s, specials, chi, cfg.threshold);
        const double bound = cfg.prep_bound.value_or(pr.bound);
        const bool ok = pr.exceed_probability <= bound + 1e-12;
        pass = pass && ok;
        json x = to_json(pr);
        x["gate_bound"] = bound;
        x["pass"] = ok;
        per.push_back(std::move(x));
    }
    rep["per_special"] = per;
    rep["pass"] = pass;
    write_json(fs::path(cfg.out) / "prepare.json", rep);
    return {pass ? kPass : kGateFailed, rep};
}

CommandResult cmd_oracle(const RunConfig& cfg) {
    cfg.validate();
    json rep;
    auto rng = substream(cfg.seed, "synthetic");
    std::size_t violations = 0, hypothesis_failures = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.families; ++i) {
        SyntheticFamily f = random_family(rng);
        RobustProbResult r = robust_prob_oracle(f, family_delta(f), cfg.c);
        if (!r.hypothesis_ok) ++hypothesis_failures;
        if (!r.holds) ++violations;
        worst_margin = std::min(worst_margin, r.probability_within - (1.0 - r.bound));
    }
    rep["robust_prob"] = {{"families", cfg.families},
                          {"c", cfg.c},
                          {"violations", violations},
                          {"hypothesis_failures", hypothesis_failures},
                          {"worst_margin", finite(worst_margin)}};

    auto vrng = substream(cfg.seed, "synthetic", 1);
    std::size_t td_fail = 0, se_fail = 0;
    for (std::size_t i = 0; i < cfg.vector_pairs; ++i) {
        const std::size_t dim = 2 + vrng() % 6;
        Vec u = random_state(dim, vrng), v = random_state(dim, vrng);
        if (projector_trace_distance(u, v) > (u - v).norm() + 1e-12) ++td_fail;
        const double su = uniform01(vrng), sv = uniform01(vrng);
        if (projector_trace_distance(su * u, sv * v) > 2.0 * (su * u - sv * v).norm() + 1e-12) ++td_fail;
        // Re<u|v> >= 1 - e  <=>  ||u - v|| <= sqrt(2 e), at e = 1 - Re<u|v>
        const double e = 1.0 - u.dot(v).real();
        if (std::abs((u - v).norm() - std::sqrt(std::max(0.0, 2.0 * e))) > 1e-9) ++se_fail;
    }
    rep["trace_dist_bound"] = {{"pairs", cfg.vector_pairs}, {"violations", td_fail}};
    rep["state_estimate"] = {{"pairs", cfg.vector_pairs}, {"violations", se_fail}};

    bool pass = violations == 0 && td_fail == 0 && se_fail == 0;
    if (cfg.n <= 3) {
        std::vector<std::string> warnings;
        QuestionSet specials = resolve_specials(cfg, warnings);
        Strategy s = densify(resolve_strategy(cfg));
        json per = json::array();
        for (const auto& chi : chosen_chis(cfg, specials)) {
            PrepReport pr = prep_distance_report(s, specials, chi);
            const bool ok = pr.full_exceed_probability <= pr.full_bound + 1e-12;
            pass = pass && ok;
            per.push_back({{"chi", to_string(chi)},
                           {"delta_avg", pr.delta_avg},
                           {"threshold", pr.full_threshold},
                           {"exceed_probability", pr.full_exceed_probability},
                           {"bound", pr.full_bound},
                           {"pass", ok}});
        }
        rep["strategy_check"] = per;
    }
    rep["pass"] = pass;
    write_json(fs::path(cfg.out) / "oracle.json", rep);
    return {pass ? kPass : kGateFailed, rep};
}

int run_cli(int argc, char** argv) {
    CLI::App app{"bellforge: parallel self-testing and remote state preparation checks"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    RunConfig flags;
    std::string specials_csv, chi_csv;
    double noise_p = 0.0;
    std::size_t specials_count = 0;
    double gate = 0.0, threshold = 0.0, prep_bound = 0.0;

    auto* o_config = app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    auto* o_seed = app.add_option("--seed", flags.seed, "root seed");
    auto* o_out = app.add_option("--out", flags.out, "output directory");
    auto* o_gate = app.add_option("--gate", gate, "acceptance gate (epsilon for audit, distance for selftest)");
    auto* o_trials = app.add_option("--trials", flags.trials, "sampled trials per cell");
    auto* o_alpha = app.add_option("--alpha", flags.alpha, "confidence parameter");
    auto* o_n = app.add_option("--n", flags.n, "number of qubits");
    auto* o_m = app.add_option("--m", flags.m, "alphabet size");
    auto* o_noise = app.add_option("--noise-p", noise_p, "depolarizing probability per pair");
    auto* o_strategy = app.add_option("--strategy", flags.strategy, "strategy JSON (default: honest)");
    auto* o_specials = app.add_option("--specials", specials_csv, "comma separated special questions");
    auto* o_count = app.add_option("--specials-count", specials_count, "number of random special questions");
    auto* o_minz = app.add_option("--min-z-fraction", flags.min_z_fraction, "minimum fraction of z symbols");
    auto* o_tol = app.add_option("--tolerance", flags.tolerance, "analytic tolerance");
    auto* o_conj = app.add_flag("--conjugate", flags.conjugate, "complex conjugate the strategy");
    auto* o_chi = app.add_option("--chi", chi_csv, "comma separated subset of special questions");
    auto* o_thr = app.add_option("--threshold", threshold, "trace distance threshold for prepare");
    auto* o_pb = app.add_option("--prep-bound", prep_bound, "allowed exceed probability for prepare");
    auto* o_wt = app.add_flag("--write-trials", flags.write_trials, "write trials.csv during audit");
    auto* o_fam = app.add_option("--families", flags.families, "synthetic families for oracle");
    auto* o_pairs = app.add_option("--vector-pairs", flags.vector_pairs, "random vector pairs for oracle");

    auto* gen = app.add_subcommand("gen-questions", "write special and full question sets");
    auto* audit = app.add_subcommand("audit", "evaluate every requested correlation");
    auto* selftest = app.add_subcommand("selftest", "operator relations and isometry distances");
    auto* prepare = app.add_subcommand("prepare", "post-measurement state distances");
    app.add_subcommand("oracle", "robustness lemma suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kBadInput;
    }

    try {
        RunConfig cfg;
        if (*o_config) {
            std::ifstream f(config_path);
            cfg = config_from_json(json::parse(f));
        }
        auto split = [](const std::string& s) {
            std::vector<std::string> out;
            std::stringstream ss(s);
            for (std::string item; std::getline(ss, item, ',');)
                if (!item.empty()) out.push_back(item);
            return out;
        };
        if (*o_seed) cfg.seed = flags.seed;
        if (*o_out) cfg.out = flags.out;
        if (*o_gate) cfg.gate = gate;
        if (*o_trials) cfg.trials = flags.trials;
        if (*o_alpha) cfg.alpha = flags.alpha;
        if (*o_n) cfg.n = flags.n;
        if (*o_m) cfg.m = flags.m;
        if (*o_noise) cfg.noise = {NoiseSpec::Kind::depolarizing, noise_p};
        if (*o_strategy) cfg.strategy = flags.strategy;
        if (*o_specials) cfg.specials = split(specials_csv);
        if (*o_count) cfg.specials_count = specials_count;
        if (*o_minz) cfg.min_z_fraction = flags.min_z_fraction;
        if (*o_tol) cfg.tolerance = flags.tolerance;
        if (*o_conj) cfg.conjugate = flags.conjugate;
        if (*o_chi) cfg.chi = split(chi_csv);
        if (*o_thr) cfg.threshold = threshold;
        if (*o_pb) cfg.prep_bound = prep_bound;
        if (*o_wt) cfg.write_trials = flags.write_trials;
        if (*o_fam) cfg.families = flags.families;
        if (*o_pairs) cfg.vector_pairs = flags.vector_pairs;

        CommandResult res;
        std::string name;
        if (*gen) {
            res = cmd_gen_questions(cfg);
            name = "gen-questions";
        } else if (*audit) {
            res = cmd_audit(cfg);
            name = "audit";
        } else if (*selftest) {
            res = cmd_selftest(cfg);
            name = "selftest";
        } else if (*prepare) {
            res = cmd_prepare(cfg);
            name = "prepare";
        } else {
            res = cmd_oracle(cfg);
            name = "oracle";
        }
        std::cout << name << ": " << (res.exit_code == kPass ? "pass" : "fail") << " (report in " << cfg.out << ")\n";
        return res.exit_code;
    } catch (const MissingCellsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

}  // namespace bellforge
