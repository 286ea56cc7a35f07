#pragma once

#include "bellforge/linalg.hpp"
#include "bellforge/quantum.hpp"
#include "bellforge/questions.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bellforge {

// Projectors indexed by outcome. For +/- strings the index reads position 1 as
// the most significant bit and bit 1 means '-'. For Bell answers the index is
// base 4 with the first digit most significant.
using Family = std::vector<Mat>;

inline constexpr int kLozenge = 7;
inline constexpr int kFilled = 8;

// Per-pair local description: pair j holds rho[j] on (A_j, B_j).
struct PairModel {
    std::vector<Mat> rho;
    std::vector<std::array<Mat, 5>> alice;  // A_1..A_5, 2x2, question independent
    std::vector<std::array<Mat, 6>> bob;    // y = 1..6
    std::vector<std::array<Mat, 4>> gamma;  // j = 1..n-1, 4x4 on (B_j, B_j+1)
};

// Explicit state plus projector families. psi is laid out as A block, B block,
// then E block (hidden environment, traced out with Alice).
struct DenseModel {
    Layout layout;
    Vec psi;
    std::size_t dA = 1, dB = 1, dE = 1;

    std::map<Question, Family> alice;
    std::optional<Family> alice_default;
    // When non-empty, A is n qubits and Alice measures basis x_j on A_j.
    std::vector<std::array<Mat, 5>> alice_local;

    std::array<Family, 6> bob;
    Family lozenge, filled;

    Mat psi_block(std::size_t e) const;  // dA x dB slice for environment index e
};

struct Strategy {
    int n = 0;
    std::optional<PairModel> pairs;
    std::shared_ptr<const DenseModel> dense;

    bool factorized() const { return pairs.has_value(); }
    void validate() const;
};

struct NoiseSpec {
    enum class Kind { none, depolarizing } kind = Kind::none;
    double p = 0.0;
};

std::size_t lozenge_length(int n);
std::size_t filled_length(int n);

Strategy honest_strategy(int n);
Strategy depolarize(const Strategy& s, const NoiseSpec& spec);
Strategy densify(const Strategy& s);
// Entrywise complex conjugation of state and every measurement.
Strategy conjugate(const Strategy& s);

Family alice_family(const Strategy& s, const Question& x);
Mat alice_observable(const Strategy& s, const Question& x, int j);
Mat bob_observable(const Strategy& s, int y, int j);
Mat bob_combination(const Strategy& s, int q, int j);
Mat gamma_projector(const Strategy& s, int j, int b);
Family bob_family(const Strategy& s, int y);

// Pair-local observables for the factorized path.
Mat local_alice(const PairModel& p, const Question& x, int j);
// rho_j (x) rho_j+1 reordered to (A_j, A_j+1, B_j, B_j+1)
Mat two_pair_rho(const PairModel& p, int j);

// Dense expectation of (a_op on A) x (b_op on B) x I_E.
cplx dense_expectation(const DenseModel& d, const Mat& a_op, const Mat& b_op);
Vec dense_apply(const DenseModel& d, const Mat& a_op, const Mat& b_op);

// Round outcome distribution as independent groups of positions.
struct OutcomeGroup {
    std::vector<int> alice_pos;  // 1-based positions
    std::vector<int> bob_slot;   // 1-based positions (y<=6) or digit indices
    int bob_radix = 2;
    std::vector<double> cdf;     // over alice_index * bob_count + bob_index
};

struct RoundDistribution {
    int n = 0;
    int y = 1;
    std::vector<OutcomeGroup> groups;
};

struct RoundOutcome {
    Outcomes a;             // +1 / -1
    std::vector<int> b;     // +1/-1 for y<=6, digits 1..4 for Bell answers
};

RoundDistribution round_distribution(const Strategy& s, const Question& x, int y);
RoundOutcome sample(const RoundDistribution& dist, std::mt19937_64& rng);
RoundOutcome sample_round(const Strategy& s, const Question& x, int y, std::mt19937_64& rng);

std::string outcome_string(const Outcomes& a);
std::string answer_string(int y, const std::vector<int>& b);
std::string y_label(int y);
int parse_y(const std::string& s);

Strategy load_strategy(const std::string& path);
Strategy strategy_from_json(const std::string& text);
std::string strategy_to_json(const Strategy& s);

// Random dense strategies for property tests.
Strategy random_pair_strategy(std::mt19937_64& rng);
Mat random_unitary(std::size_t d, std::mt19937_64& rng);
Mat random_involution(std::size_t d, std::mt19937_64& rng);
Vec random_state(std::size_t d, std::mt19937_64& rng);

}  // namespace bellforge
