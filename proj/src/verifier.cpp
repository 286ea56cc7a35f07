#include "bellforge/verifier.hpp"

#include "bellforge/util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bellforge {

namespace {

const double kR2 = 1.0 / std::numbers::sqrt2;

struct ChshTerm {
    int q, y, sign;
};

// C = A3(D_zx+E_zx) + A1(D_zx-E_zx) + A3(D_zy+E_zy) + A2(D_zy-E_zy) + A1(D_xy+E_xy) + A2(D_xy-E_xy)
constexpr ChshTerm kChshTerms[12] = {{3, 1, 1}, {3, 2, 1},  {1, 1, 1}, {1, 2, -1}, {3, 3, 1}, {3, 4, 1},
                                     {2, 3, 1}, {2, 4, -1}, {1, 5, 1}, {1, 6, 1},  {2, 5, 1}, {2, 6, -1}};

// The six (A_q, y_a, y_b, sign) squared terms of the SOS form.
struct SosTerm {
    int q, ya, yb, sign;
};
constexpr SosTerm kSosTerms[6] = {{3, 1, 2, 1}, {1, 1, 2, -1}, {3, 3, 4, 1}, {2, 3, 4, -1}, {1, 5, 6, 1}, {2, 5, 6, -1}};

class Evaluator {
public:
    Evaluator(const Strategy& s, EvalPath path) : n_(s.n) {
        if (path == EvalPath::factorized && !s.pairs) throw std::invalid_argument("strategy has no factorized model");
        use_pairs_ = path == EvalPath::factorized || (path == EvalPath::automatic && s.pairs.has_value());
        if (use_pairs_) {
            strategy_ = s;
        } else {
            strategy_ = densify(s);
            for (int j = 1; j <= n_; ++j) {
                std::array<Mat, 6> row;
                for (int y = 1; y <= 6; ++y) row[y - 1] = bob_observable(strategy_, y, j);
                bob_.push_back(row);
            }
        }
    }

    double correlator(const Question& x, int j, int y) const {
        if (y < 1 || y > 6) throw std::invalid_argument("Bob question must be in 1..6");
        if (use_pairs_) {
            const auto& p = *strategy_.pairs;
            return (p.rho[j - 1] * tensor_product({local_alice(p, x, j), p.bob[j - 1][y - 1]})).trace().real();
        }
        return dense_expectation(*strategy_.dense, alice_observable(strategy_, x, j), bob_[j - 1][y - 1]).real();
    }

    double triple_chsh(int j, const Question& xj) const {
        double total = 0;
        for (const auto& t : kChshTerms) total += t.sign * correlator(insert_position(xj, j, t.q), j, t.y);
        return total;
    }

    double conj(int j, int q, const Question& chi_prime) const {
        if (n_ < 2 || j < 1 || j >= n_) throw std::invalid_argument("conjugation test needs 1 <= j < n");
        Question w = conj_question(chi_prime, j, q);
        auto sg = conj_signs(q);
        if (use_pairs_) {
            const auto& p = *strategy_.pairs;
            Mat g = Mat::Zero(4, 4);
            for (int b = 0; b < 4; ++b) g += static_cast<double>(sg[b]) * p.gamma[j - 1][b];
            Mat op = tensor_product({local_alice(p, w, j), local_alice(p, w, j + 1), g});
            return (two_pair_rho(p, j) * op).trace().real();
        }
        const auto& d = *strategy_.dense;
        Mat g = Mat::Zero(d.dB, d.dB);
        for (int b = 1; b <= 4; ++b) g += static_cast<double>(sg[b - 1]) * gamma_projector(strategy_, j, b);
        Mat a = alice_observable(strategy_, w, j) * alice_observable(strategy_, w, j + 1);
        return dense_expectation(d, a, g).real();
    }

private:
    int n_;
    bool use_pairs_ = false;
    Strategy strategy_;
    std::vector<std::array<Mat, 6>> bob_;
};

void require_special(const QuestionSet& specials, const Question& chi) {
    if (!specials.contains(chi)) throw std::invalid_argument("question " + to_string(chi) + " is not special");
}

void require_reduced(const QuestionSet& specials, int j, const Question& xj) {
    if (j < 1 || j > specials.n) throw std::out_of_range("position out of range");
    if (!reduced_set(specials, j).contains(xj))
        throw std::invalid_argument("reduced question '" + to_string(xj) + "' not in the reduced set at position " +
                                    std::to_string(j));
}

int perfect_y(int which) {
    if (which == 4) return 5;
    if (which == 5) return 6;
    throw std::invalid_argument("perfect correlation index must be 4 or 5");
}

}  // namespace

double epsilon_from_deficits(double chsh, double perfect, double conj) {
    return std::max({0.0, std::numbers::sqrt2 * chsh, perfect, 2.0 * conj});
}

std::size_t correlator_bound(int m, int n, std::size_t specials) {
    const std::size_t nn = static_cast<std::size_t>(n);
    return 12 * nn * (1 + static_cast<std::size_t>(m - 1) * nn) * specials + 2 * nn * specials + 3 * (nn - 1);
}

std::array<int, 4> conj_signs(int q) {
    if (q < 1 || q > 3) throw std::invalid_argument("conjugation index must be in 1..3");
    return {q == 2 ? -1 : 1, q == 1 ? -1 : 1, q == 3 ? -1 : 1, -1};
}

Question conj_question(const Question& chi_prime, int j, int q) {
    return with_position(with_position(chi_prime, j, q), j + 1, q);
}

double correlator(const Strategy& s, const Question& x, int j, int y, EvalPath path) {
    if (j < 1 || j > s.n) throw std::out_of_range("position out of range");
    return Evaluator(s, path).correlator(x, j, y);
}

double triple_chsh_value(const Strategy& s, const QuestionSet& specials, int j, const Question& xj, EvalPath path) {
    require_reduced(specials, j, xj);
    return Evaluator(s, path).triple_chsh(j, xj);
}

double perfect_corr_value(const Strategy& s, const QuestionSet& specials, int j, const Question& chi, int which,
                          EvalPath path) {
    int y = perfect_y(which);
    require_special(specials, chi);
    if (j < 1 || j > s.n) throw std::out_of_range("position out of range");
    return Evaluator(s, path).correlator(with_position(chi, j, which), j, y);
}

double conj_corr_value(const Strategy& s, const QuestionSet& specials, int j, int q, const Question& chi_prime,
                       EvalPath path) {
    require_special(specials, chi_prime);
    return Evaluator(s, path).conj(j, q, chi_prime);
}

AuditReport full_audit(const Strategy& s, const QuestionSet& specials, EvalPath path) {
    if (specials.n != s.n) throw std::invalid_argument("special questions do not match strategy length");
    if (specials.members.empty()) throw std::invalid_argument("empty special set");
    Evaluator ev(s, path);
    const int n = s.n;

    struct Task {
        int kind;
        CellKey key;
        double value = 0;
    };
    std::vector<Task> tasks;
    for (int j = 1; j <= n; ++j)
        for (const auto& xj : reduced_set(specials, j).members) tasks.push_back({0, {j, xj, 0}});
    for (int j = 1; j <= n; ++j)
        for (const auto& chi : specials.members)
            for (int which : {4, 5}) tasks.push_back({1, {j, chi, which}});
    const Question& chi_prime = specials.members.front();
    for (int j = 1; j < n; ++j)
        for (int q = 1; q <= 3; ++q) tasks.push_back({2, {j, chi_prime, q}});

    parallel_for(tasks.size(), [&](std::size_t i) {
        auto& t = tasks[i];
        const auto& [j, x, tag] = t.key;
        if (t.kind == 0) t.value = ev.triple_chsh(j, x);
        else if (t.kind == 1) t.value = ev.correlator(with_position(x, j, tag), j, perfect_y(tag));
        else t.value = ev.conj(j, tag, x);
    });

    AuditReport r;
    r.n = n;
    r.specials = specials.size();
    for (const auto& t : tasks) {
        if (t.kind == 0) {
            r.triple_chsh[t.key] = {t.value, 0.0};
            r.chsh_deficit = std::max(r.chsh_deficit, kTripleChshMax - t.value);
            r.correlator_count += 12;
        } else if (t.kind == 1) {
            r.perfect_corr[t.key] = {t.value, 0.0};
            r.perfect_deficit = std::max(r.perfect_deficit, 1.0 - t.value);
            r.correlator_count += 1;
        } else {
            r.conj_corr[t.key] = {t.value, 0.0};
            r.conj_deficit = std::max(r.conj_deficit, 1.0 - t.value);
            r.correlator_count += 1;
        }
    }
    r.epsilon = epsilon_from_deficits(r.chsh_deficit, r.perfect_deficit, r.conj_deficit);
    r.epsilon_lower = r.epsilon;
    return r;
}

// SOS -------------------------------------------------------------------------

Mat triple_chsh_operator(const PairObservables& o) {
    const auto dA = o.alice[0].rows(), dB = o.bob[0].rows();
    Mat c = Mat::Zero(dA * dB, dA * dB);
    for (const auto& t : kChshTerms) c += static_cast<double>(t.sign) * tensor_product({o.alice[t.q - 1], o.bob[t.y - 1]});
    return c;
}

std::array<Mat, 6> sos_terms(const PairObservables& o) {
    const auto dA = o.alice[0].rows(), dB = o.bob[0].rows();
    const double scale = std::pow(2.0, -0.25);
    std::array<Mat, 6> f;
    for (int i = 0; i < 6; ++i) {
        const auto& t = kSosTerms[i];
        Mat bbar = kR2 * (o.bob[t.ya - 1] + static_cast<double>(t.sign) * o.bob[t.yb - 1]);
        f[i] = scale * (tensor_product({o.alice[t.q - 1], identity(dB)}) - tensor_product({identity(dA), bbar}));
    }
    return f;
}

Mat sos_operator(const PairObservables& o) {
    auto f = sos_terms(o);
    Mat sum = Mat::Zero(f[0].rows(), f[0].cols());
    for (const auto& m : f) sum += m.adjoint() * m;
    return sum;
}

std::vector<double> sos_residuals(const Strategy& s, const QuestionSet& specials, int j, const Question& xj) {
    require_reduced(specials, j, xj);
    const double scale = std::pow(2.0, -0.25);
    std::vector<double> out;
    if (s.pairs) {
        const auto& p = *s.pairs;
        for (const auto& t : kSosTerms) {
            Mat a = local_alice(p, insert_position(xj, j, t.q), j);
            Mat bbar = kR2 * (p.bob[j - 1][t.ya - 1] + static_cast<double>(t.sign) * p.bob[j - 1][t.yb - 1]);
            Mat x = tensor_product({a, identity(2)}) - tensor_product({identity(2), bbar});
            double sq = (p.rho[j - 1] * x.adjoint() * x).trace().real();
            out.push_back(scale * std::sqrt(std::max(0.0, sq)));
        }
        return out;
    }
    const auto& d = *s.dense;
    for (const auto& t : kSosTerms) {
        Mat a = alice_observable(s, insert_position(xj, j, t.q), j);
        Mat bbar = kR2 * (bob_observable(s, t.ya, j) + static_cast<double>(t.sign) * bob_observable(s, t.yb, j));
        Vec v = dense_apply(d, a, identity(d.dB)) - dense_apply(d, identity(d.dA), bbar);
        out.push_back(scale * v.norm());
    }
    return out;
}

// Sampling --------------------------------------------------------------------

std::vector<Cell> requested_cells(const QuestionSet& specials) {
    const int n = specials.n;
    std::vector<Cell> cells;
    for (int j = 1; j <= n; ++j)
        for (const auto& xj : reduced_set(specials, j).members)
            for (const auto& t : kChshTerms) cells.emplace_back(insert_position(xj, j, t.q), t.y);
    for (int j = 1; j <= n; ++j)
        for (const auto& chi : specials.members)
            for (int which : {4, 5}) cells.emplace_back(with_position(chi, j, which), perfect_y(which));
    const Question& chi_prime = specials.members.front();
    for (int j = 1; j < n; ++j)
        for (int q = 1; q <= 3; ++q) cells.emplace_back(conj_question(chi_prime, j, q), j % 2 == 1 ? kLozenge : kFilled);
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

void TrialTally::add(const TrialRecord& r) {
    if (static_cast<int>(r.a.size()) != n || static_cast<int>(r.x.size()) != n)
        throw std::invalid_argument("trial record length does not match n");
    auto& c = cells[{r.x, r.y}];
    if (c.trials == 0 && c.agree.empty() && c.bell.empty()) {
        if (r.y <= 6) c.agree.assign(n, 0);
        else c.bell.assign(std::max(0, n - 1), {});
    }
    ++c.trials;
    if (r.y <= 6) {
        if (static_cast<int>(r.b.size()) != n) throw std::invalid_argument("Bob answer length mismatch");
        for (int j = 0; j < n; ++j)
            if (r.a[j] == r.b[j]) ++c.agree[j];
        return;
    }
    const std::size_t len = r.y == kLozenge ? lozenge_length(n) : filled_length(n);
    if (r.b.size() != len) throw std::invalid_argument("Bell answer length mismatch");
    for (std::size_t k = 1; k <= len; ++k) {
        int j = r.y == kLozenge ? static_cast<int>(2 * k - 1) : static_cast<int>(2 * k);
        int digit = r.b[k - 1];
        if (digit < 1 || digit > 4) throw std::invalid_argument("Bell answer digit out of range");
        int odd = (r.a[j - 1] * r.a[j] == -1) ? 1 : 0;
        ++c.bell[j - 1][digit - 1][odd];
    }
}

MissingCellsError::MissingCellsError(std::vector<Cell> cells)
    : std::runtime_error([&] {
          std::string msg = "trial records do not cover " + std::to_string(cells.size()) + " requested cell(s):";
          std::size_t shown = 0;
          for (const auto& c : cells) {
              if (++shown > 20) {
                  msg += " ...";
                  break;
              }
              msg += " " + cell_name(c);
          }
          return msg;
      }()),
      missing_(std::move(cells)) {}

std::string cell_name(const Cell& c) { return to_string(c.first) + "/" + y_label(c.second); }

namespace {
std::vector<RoundDistribution> cell_distributions(const Strategy& s, const std::vector<Cell>& cells) {
    std::vector<RoundDistribution> dists(cells.size());
    parallel_for(cells.size(), [&](std::size_t c) { dists[c] = round_distribution(s, cells[c].first, cells[c].second); });
    return dists;
}

TrialRecord make_record(std::uint64_t round, const Cell& cell, RoundOutcome&& o) {
    return TrialRecord{round, cell.first, cell.second, std::move(o.a), std::move(o.b)};
}

Strategy sampling_model(const Strategy& s) { return s.pairs ? s : densify(s); }
}  // namespace

TrialTally simulate_tally(const Strategy& s0, const QuestionSet& specials, std::uint64_t trials_per_cell,
                          std::uint64_t seed) {
    Strategy s = sampling_model(s0);
    auto cells = requested_cells(specials);
    auto dists = cell_distributions(s, cells);
    std::vector<TrialTally> parts(cells.size());
    const std::uint64_t count = cells.size();
    parallel_for(cells.size(), [&](std::size_t c) {
        auto rng = substream(seed, "sampling", c);
        parts[c].n = s.n;
        for (std::uint64_t t = 0; t < trials_per_cell; ++t)
            parts[c].add(make_record(t * count + c, cells[c], sample(dists[c], rng)));
    });
    TrialTally out;
    out.n = s.n;
    for (auto& p : parts)
        for (auto& [k, v] : p.cells) out.cells[k] = std::move(v);
    return out;
}

void simulate_records(const Strategy& s0, const QuestionSet& specials, std::uint64_t trials_per_cell, std::uint64_t seed,
                      const std::function<void(const TrialRecord&)>& sink) {
    Strategy s = sampling_model(s0);
    auto cells = requested_cells(specials);
    auto dists = cell_distributions(s, cells);
    std::vector<std::mt19937_64> rngs;
    for (std::size_t c = 0; c < cells.size(); ++c) rngs.push_back(substream(seed, "sampling", c));
    const std::uint64_t count = cells.size();
    for (std::uint64_t t = 0; t < trials_per_cell; ++t)
        for (std::size_t c = 0; c < cells.size(); ++c) sink(make_record(t * count + c, cells[c], sample(dists[c], rngs[c])));
}

double hoeffding_radius(std::uint64_t trials, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (trials == 0) return std::numeric_limits<double>::infinity();
    // mean of +/-1 variables: range 2
    return std::sqrt(2.0 * std::log(2.0 / alpha) / static_cast<double>(trials));
}

AuditReport estimate_from_trials(const TrialTally& tally, const QuestionSet& specials, double alpha) {
    const int n = specials.n;
    if (tally.n != 0 && tally.n != n) throw std::invalid_argument("trial records do not match special set length");
    std::vector<Cell> missing;
    auto lookup = [&](const Cell& c) -> const CellTally* {
        auto it = tally.cells.find(c);
        if (it == tally.cells.end() || it->second.trials == 0) {
            missing.push_back(c);
            return nullptr;
        }
        return &it->second;
    };
    auto corr = [&](const Question& x, int j, int y) -> AuditValue {
        const CellTally* c = lookup({x, y});
        if (!c) return {};
        double nn = static_cast<double>(c->trials);
        return {(2.0 * static_cast<double>(c->agree[j - 1]) - nn) / nn, hoeffding_radius(c->trials, alpha)};
    };

    AuditReport r;
    r.n = n;
    r.specials = specials.size();
    r.statistical = true;
    r.alpha = alpha;
    double lower_chsh = 0, lower_perfect = 0, lower_conj = 0;
    for (int j = 1; j <= n; ++j)
        for (const auto& xj : reduced_set(specials, j).members) {
            AuditValue v;
            for (const auto& t : kChshTerms) {
                AuditValue c = corr(insert_position(xj, j, t.q), j, t.y);
                v.value += t.sign * c.value;
                v.radius += c.radius;
            }
            r.triple_chsh[{j, xj, 0}] = v;
            r.chsh_deficit = std::max(r.chsh_deficit, kTripleChshMax - v.value);
            lower_chsh = std::max(lower_chsh, kTripleChshMax - v.value - v.radius);
            r.correlator_count += 12;
        }
    for (int j = 1; j <= n; ++j)
        for (const auto& chi : specials.members)
            for (int which : {4, 5}) {
                AuditValue v = corr(with_position(chi, j, which), j, perfect_y(which));
                r.perfect_corr[{j, chi, which}] = v;
                r.perfect_deficit = std::max(r.perfect_deficit, 1.0 - v.value);
                lower_perfect = std::max(lower_perfect, 1.0 - v.value - v.radius);
                r.correlator_count += 1;
            }
    const Question& chi_prime = specials.members.front();
    for (int j = 1; j < n; ++j)
        for (int q = 1; q <= 3; ++q) {
            const CellTally* c = lookup({conj_question(chi_prime, j, q), j % 2 == 1 ? kLozenge : kFilled});
            AuditValue v;
            if (c) {
                auto sg = conj_signs(q);
                double acc = 0;
                for (int b = 0; b < 4; ++b)
                    acc += sg[b] * (static_cast<double>(c->bell[j - 1][b][0]) - static_cast<double>(c->bell[j - 1][b][1]));
                v = {acc / static_cast<double>(c->trials), hoeffding_radius(c->trials, alpha)};
            }
            r.conj_corr[{j, chi_prime, q}] = v;
            r.conj_deficit = std::max(r.conj_deficit, 1.0 - v.value);
            lower_conj = std::max(lower_conj, 1.0 - v.value - v.radius);
            r.correlator_count += 1;
        }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        throw MissingCellsError(std::move(missing));
    }
    r.epsilon = epsilon_from_deficits(r.chsh_deficit, r.perfect_deficit, r.conj_deficit);
    r.epsilon_lower = epsilon_from_deficits(lower_chsh, lower_perfect, lower_conj);
    return r;
}

AuditReport estimate_from_trials(const std::vector<TrialRecord>& records, const QuestionSet& specials, double alpha) {
    TrialTally t;
    t.n = specials.n;
    for (const auto& r : records) t.add(r);
    return estimate_from_trials(t, specials, alpha);
}

std::string trial_csv_header() { return "round,x,y,a,b"; }

std::string trial_csv_line(const TrialRecord& r) {
    return std::to_string(r.round) + "," + to_string(r.x) + "," + y_label(r.y) + "," + outcome_string(r.a) + "," +
           answer_string(r.y, r.b);
}

TrialRecord parse_trial_csv_line(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 5) throw std::invalid_argument("trial line needs 5 fields: " + line);
    TrialRecord r;
    r.round = std::stoull(f[0]);
    r.x = parse_question(f[1]);
    r.y = parse_y(f[2]);
    for (char c : f[3]) {
        if (c != '+' && c != '-') throw std::invalid_argument("invalid Alice answer in: " + line);
        r.a.push_back(c == '+' ? 1 : -1);
    }
    for (char c : f[4]) {
        if (r.y <= 6) {
            if (c != '+' && c != '-') throw std::invalid_argument("invalid Bob answer in: " + line);
            r.b.push_back(c == '+' ? 1 : -1);
        } else {
            if (c < '1' || c > '4') throw std::invalid_argument("invalid Bell answer in: " + line);
            r.b.push_back(c - '0');
        }
    }
    return r;
}

}  // namespace bellforge
