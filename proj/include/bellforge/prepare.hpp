#pragma once

#include "bellforge/strategy.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bellforge {

// Outcomes below this probability carry no mass and are skipped.
inline constexpr double kNegligibleProbability = 1e-12;

// Index into an Alice family: position 1 is the most significant bit, '-' is 1.
std::size_t outcome_index(const Outcomes& a);
Outcomes outcome_from_index(std::size_t idx, int n);

// Bob's normalized state after Alice answers a to chi.
Mat post_measurement_rho(const Strategy& s, const QuestionSet& specials, const Question& chi, const Outcomes& a);

// beta0 (x) [e_1><e_1| (x) |0><0|] (x) ... + beta1 (x) [e*_1><e*_1| (x) |1><1|] (x) ...
// on [B, B'_1, B''_1, ..., B'_n, B''_n].
Mat ideal_target(const Question& chi, const Outcomes& a, const Mat& beta0, const Mat& beta1);

struct OutcomeRow {
    Outcomes a;
    double p = 0.0;
    double D = 0.0;       // Bob side, after V_B
    double D_full = 0.0;  // whole extracted vector against the reference branch
    bool excluded = false;
};

struct PrepReport {
    Question chi;
    std::vector<OutcomeRow> per_outcome;
    double probability_sum = 0.0;
    double beta0_trace = 0.0, beta1_trace = 0.0;
    double gamma = 0.0;      // max over s of the product-action distance
    double threshold = 0.0;
    double exceed_probability = 0.0;
    double bound = 0.0;      // 4 gamma^(2/3)
    double delta_avg = 0.0;  // sqrt(2^-n sum_s d_s^2)
    double full_threshold = 0.0;
    double full_exceed_probability = 0.0;
    double full_bound = 0.0;
};

PrepReport prep_distance_report(const Strategy& s, const QuestionSet& specials, const Question& chi,
                                std::optional<double> threshold = std::nullopt);

// 1/2 || |u><u| - |v><v| ||_1 for arbitrary (possibly subnormalized) vectors.
double projector_trace_distance(const Vec& u, const Vec& v);
// 1/2 || u^ u^* - v^ v^* ||_1 after normalizing both vectors.
double normalized_trace_distance(const Vec& u, const Vec& v);

struct SyntheticFamily {
    std::vector<double> pi;                // over sigma
    std::vector<std::vector<Vec>> u, v;    // [sigma][omega]
};

// sqrt(sum_sigma pi(sigma) sum_omega ||u - v||^2)
double family_delta(const SyntheticFamily& f);

struct RobustProbResult {
    double hypothesis_lhs = 0.0;  // sum_sigma pi sum_omega ||u - v||^2
    bool hypothesis_ok = false;
    double probability_within = 0.0;  // Pr(D <= delta^c) under p(sigma, omega)
    double exceed_fraction = 0.0;
    double bound = 0.0;               // 4 delta^(2(1-c))
    bool holds = false;               // probability_within >= 1 - bound
};

RobustProbResult robust_prob_oracle(const SyntheticFamily& f, double delta, double c);

// Random family with sum_omega ||u||^2 = 1 for every sigma and perturbation size
// drawn on a log scale.
SyntheticFamily random_family(std::mt19937_64& rng);

}  // namespace bellforge
