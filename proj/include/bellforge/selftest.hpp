#pragma once

#include "bellforge/strategy.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bellforge {

// Largest output vector (amplitudes) the dense isometry is allowed to build.
inline constexpr std::size_t kDenseIsometryCap = std::size_t{1} << 22;

Mat regularized_Q(const Strategy& s, int j, int q);

struct RelationReport {
    Question chi;
    std::map<std::pair<int, int>, double> symmetry;                  // (j, q)
    std::map<std::tuple<int, int, int, int>, double> comm_bob;       // (j, k, q, r), j < k
    std::map<std::tuple<int, int, int, int>, double> comm_alice;     // (j, k, q, r), j < k
    std::map<std::tuple<int, int, int>, double> acomm_alice;         // (j, q, r), q < r
    std::map<std::tuple<int, int, int>, double> acomm_bob;           // (j, q, r), q < r
    std::map<int, double> conj;                                      // j < n
    // ||(A_4 - (A_1 + A_2)/sqrt2) psi|| and ||(A_5 - (A_1 - A_2)/sqrt2) psi||, not part of eta
    std::map<std::pair<int, int>, double> extra_linear;              // (j, 4|5)
    double eta = 0.0;
};

// Constants multiplying sqrt(eps) for each relation family.
double symmetry_bound_factor();
double comm_bob_bound_factor();
double comm_alice_bound_factor();
double acomm_alice_bound_factor();
double acomm_bob_bound_factor(int q, int r);
double conj_bound_factor();
inline constexpr double kGlobalConjFactor = 118.0;

RelationReport relation_check(const Strategy& s, const QuestionSet& specials, const Question& chi);
// Entries "<family> <key>: residual > bound" for every relation above its bound.
std::vector<std::string> relation_violations(const RelationReport& r, double epsilon, double slack = 1e-9);

// (j, sign) -> residual, sign = +1 or -1
std::map<std::pair<int, int>, double> global_conj_check(const Strategy& s);

// One side of V = V^(n)...V^(1): rows are (physical, c) with c the base-4 ancilla
// string, digit j = 2 a'_j + a''_j, position 1 most significant.
Mat side_isometry(const std::vector<std::array<Mat, 3>>& ops, bool alice_side);
Mat alice_isometry(const Strategy& s, const Question& chi);
Mat bob_isometry(const Strategy& s);

// Applies V_A (x) V_B to a vector on (A, B, E); output layout
// [A, B, E, A'_1, B'_1, A''_1, B''_1, ..., A'_n, B'_n, A''_n, B''_n].
Vec apply_local_isometry(const Mat& va, const Mat& vb, int n, const DenseModel& d, const Vec& v);

// J_+^(1)...J_+^(n) psi and J_-^(1)...J_-^(n) psi on (A, B, E).
std::pair<Vec, Vec> junk_states(const Strategy& s);

// sum_b sign_b xi_b (x) prod_j [(I (x) O_j) Phi+ (x) |b>|b>]; empty O_j means identity.
Vec reference_vector(int n, const Vec& xi0, const Vec& xi1, const std::vector<Mat>& ops, std::array<double, 2> sign);

struct IsometryResult {
    Question chi;
    double extracted_state_distance = 0.0;
    std::map<std::pair<int, int>, double> observable_distances;  // (k, q), q = 1..5
    std::map<std::string, double> product_distances;             // s as '0'/'1' string
    // distance of V((A_1 +- A_2)/sqrt2)psi from the q = 4|5 reference
    std::map<std::pair<int, int>, double> linear_distances;
    Vec junk_plus, junk_minus;
    std::array<double, 2> junk_weights{0.0, 0.0};
    Mat vb;
    std::uint64_t vb_fingerprint = 0;
};

IsometryResult apply_isometry(const Strategy& s, const QuestionSet& specials, const Question& chi);

struct ProductActionResult {
    double distance = 0.0;
    double delta = 0.0;  // max of state distance and the single-operator distances
    double bound = 0.0;  // (2m + 1) delta
};

// Operators are S_q^(k) for the listed (k, q) pairs at distinct positions.
ProductActionResult product_action_check(const Strategy& s, const QuestionSet& specials, const Question& chi,
                                         const std::vector<std::pair<int, int>>& ops);

// Conjugates Alice's local A_4, A_5 by exp(-i angle sigma_z / 2); Bob is untouched.
Strategy perturb_alice(const Strategy& s, double angle);

std::uint64_t matrix_fingerprint(const Mat& m);
std::string bits_string(std::size_t s, int n);

}  // namespace bellforge
