#pragma once

#include "bellforge/strategy.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bellforge {

inline const double kTripleChshMax = 6.0 * std::sqrt(2.0);

enum class EvalPath { automatic, factorized, dense };

// Triple CHSH: (j, reduced question, 0). Perfect: (j, chi, 4|5). Conjugation: (j, chi', q).
using CellKey = std::tuple<int, Question, int>;

struct AuditValue {
    double value = 0.0;
    double radius = 0.0;
};

struct AuditReport {
    int n = 0;
    std::size_t specials = 0;
    std::map<CellKey, AuditValue> triple_chsh, perfect_corr, conj_corr;
    double chsh_deficit = 0.0, perfect_deficit = 0.0, conj_deficit = 0.0;
    double epsilon = 0.0;
    // Statistical reports: epsilon after subtracting each request's radius.
    double epsilon_lower = 0.0;
    bool statistical = false;
    double alpha = 0.0;
    std::size_t correlator_count = 0;
};

double epsilon_from_deficits(double chsh, double perfect, double conj);
std::size_t correlator_bound(int m, int n, std::size_t specials);

// <A_x^(j) (x) B_y^(j)>
double correlator(const Strategy& s, const Question& x, int j, int y, EvalPath path = EvalPath::automatic);

double triple_chsh_value(const Strategy& s, const QuestionSet& specials, int j, const Question& xj,
                         EvalPath path = EvalPath::automatic);
double perfect_corr_value(const Strategy& s, const QuestionSet& specials, int j, const Question& chi, int which,
                          EvalPath path = EvalPath::automatic);
double conj_corr_value(const Strategy& s, const QuestionSet& specials, int j, int q, const Question& chi_prime,
                       EvalPath path = EvalPath::automatic);
std::array<int, 4> conj_signs(int q);
Question conj_question(const Question& chi_prime, int j, int q);

AuditReport full_audit(const Strategy& s, const QuestionSet& specials, EvalPath path = EvalPath::automatic);

// Operator forms on a single pair (A (x) B).
struct PairObservables {
    std::array<Mat, 3> alice;  // A_1, A_2, A_3
    std::array<Mat, 6> bob;    // y = 1..6
};
Mat triple_chsh_operator(const PairObservables& o);
std::array<Mat, 6> sos_terms(const PairObservables& o);  // F_i
Mat sos_operator(const PairObservables& o);               // sum F_i^dagger F_i
std::vector<double> sos_residuals(const Strategy& s, const QuestionSet& specials, int j, const Question& xj);

// Sampling ---------------------------------------------------------------------

struct TrialRecord {
    std::uint64_t round = 0;
    Question x;
    int y = 1;
    Outcomes a;
    std::vector<int> b;
};

using Cell = std::pair<Question, int>;
std::vector<Cell> requested_cells(const QuestionSet& specials);

struct CellTally {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> agree;                          // y <= 6, per position
    std::vector<std::array<std::array<std::uint64_t, 2>, 4>> bell;  // per j: [digit][a_j a_j+1 == -1]
};

struct TrialTally {
    int n = 0;
    std::map<Cell, CellTally> cells;
    void add(const TrialRecord& r);
};

class MissingCellsError : public std::runtime_error {
public:
    MissingCellsError(std::vector<Cell> cells);
    const std::vector<Cell>& cells() const { return missing_; }

private:
    std::vector<Cell> missing_;
};

TrialTally simulate_tally(const Strategy& s, const QuestionSet& specials, std::uint64_t trials_per_cell,
                          std::uint64_t seed);
// Same draws as simulate_tally, emitted in round order.
void simulate_records(const Strategy& s, const QuestionSet& specials, std::uint64_t trials_per_cell, std::uint64_t seed,
                      const std::function<void(const TrialRecord&)>& sink);

double hoeffding_radius(std::uint64_t trials, double alpha);
AuditReport estimate_from_trials(const TrialTally& tally, const QuestionSet& specials, double alpha);
AuditReport estimate_from_trials(const std::vector<TrialRecord>& records, const QuestionSet& specials, double alpha);

std::string trial_csv_header();
std::string trial_csv_line(const TrialRecord& r);
TrialRecord parse_trial_csv_line(const std::string& line);

std::string cell_name(const Cell& c);

}  // namespace bellforge
