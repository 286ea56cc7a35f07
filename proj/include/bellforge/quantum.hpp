#pragma once

#include "bellforge/linalg.hpp"
#include "bellforge/questions.hpp"

#include <utility>
#include <vector>

namespace bellforge {

// Basis symbols: x=1, y=2, z=3, x+y=4, x-y=5.
enum Basis : int { kX = 1, kY = 2, kZ = 3, kXPlusY = 4, kXMinusY = 5 };

Mat pauli(int basis);
Vec eigenstate(int basis, int sign);
Mat eigenprojector(int basis, int sign);
Mat sign_projector(const Mat& observable, int sign);

Vec phi_plus();
// 1: Phi+, 2: Phi-, 3: Psi+, 4: Psi-
Vec bell_state(int b);
Mat bell_projector(int b);

Layout pair_layout(int n);
StateVector bell_pairs(int n);

double expectation(const StateVector& psi, const Mat& m);
std::pair<StateVector, double> project(const StateVector& psi, const Mat& p);

using Outcomes = std::vector<int>;  // entries +1 / -1
Outcomes conjugate_outcomes(const Outcomes& a, const Question& chi);

}  // namespace bellforge
