#include "bellforge/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bellforge {

namespace {
const cplx I1{0.0, 1.0};

double phase_angle(int basis) {
    switch (basis) {
        case kX: return 0.0;
        case kY: return std::numbers::pi / 2;
        case kXPlusY: return std::numbers::pi / 4;
        case kXMinusY: return -std::numbers::pi / 4;
        default: throw std::invalid_argument("basis must be in 1..5");
    }
}
}  // namespace

Mat pauli(int basis) {
    Mat x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -I1, I1, 0;
    z << 1, 0, 0, -1;
    const double r = 1.0 / std::numbers::sqrt2;
    switch (basis) {
        case kX: return x;
        case kY: return y;
        case kZ: return z;
        case kXPlusY: return r * (x + y);
        case kXMinusY: return r * (x - y);
        default: throw std::invalid_argument("basis must be in 1..5");
    }
}

Vec eigenstate(int basis, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("outcome sign must be +1 or -1");
    Vec v(2);
    if (basis == kZ) {
        v << (sign == 1 ? 1.0 : 0.0), (sign == 1 ? 0.0 : 1.0);
        return v;
    }
    const double r = 1.0 / std::numbers::sqrt2;
    v << r, r * static_cast<double>(sign) * std::polar(1.0, phase_angle(basis));
    return v;
}

Mat eigenprojector(int basis, int sign) {
    Vec v = eigenstate(basis, sign);
    return v * v.adjoint();
}

Mat sign_projector(const Mat& observable, int sign) {
    return 0.5 * (identity(observable.rows()) + static_cast<double>(sign) * observable);
}

Vec phi_plus() { return bell_state(1); }

Vec bell_state(int b) {
    const double r = 1.0 / std::numbers::sqrt2;
    Vec v = Vec::Zero(4);
    switch (b) {
        case 1: v(0) = r; v(3) = r; break;
        case 2: v(0) = r; v(3) = -r; break;
        case 3: v(1) = r; v(2) = r; break;
        case 4: v(1) = r; v(2) = -r; break;
        default: throw std::invalid_argument("Bell index must be in 1..4");
    }
    return v;
}

Mat bell_projector(int b) {
    Vec v = bell_state(b);
    return v * v.adjoint();
}

Layout pair_layout(int n) {
    Layout l;
    for (int j = 1; j <= n; ++j) l.parts.push_back({"A" + std::to_string(j), 2, Role::alice});
    for (int j = 1; j <= n; ++j) l.parts.push_back({"B" + std::to_string(j), 2, Role::bob});
    return l;
}

StateVector bell_pairs(int n) {
    if (n < 1) throw std::invalid_argument("need at least one pair");
    Layout l = pair_layout(n);
    const std::size_t d = std::size_t{1} << n;
    Vec amp = Vec::Zero(static_cast<Eigen::Index>(d * d));
    const double a = std::pow(2.0, -0.5 * n);
    for (std::size_t i = 0; i < d; ++i) amp(static_cast<Eigen::Index>(i * d + i)) = a;
    return StateVector{l, amp};
}

double expectation(const StateVector& psi, const Mat& m) {
    if (m.rows() != psi.amp.size() || m.cols() != psi.amp.size()) throw std::invalid_argument("dimension mismatch");
    if (!is_hermitian(m, kHermTol * std::max(1.0, m.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("expectation requires a Hermitian operator");
    cplx e = psi.amp.dot(m * psi.amp);
    if (std::abs(e.imag()) > kTol) throw std::runtime_error("expectation has non-negligible imaginary part");
    return e.real();
}

std::pair<StateVector, double> project(const StateVector& psi, const Mat& p) {
    if (p.rows() != psi.amp.size()) throw std::invalid_argument("dimension mismatch");
    if (!is_projector(p)) throw std::invalid_argument("project requires a projector");
    StateVector out{psi.layout, p * psi.amp};
    return {out, out.amp.squaredNorm()};
}

Outcomes conjugate_outcomes(const Outcomes& a, const Question& chi) {
    if (a.size() != chi.size()) throw std::invalid_argument("length mismatch");
    Outcomes r = a;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (chi[j] == kZ) r[j] = -r[j];
    return r;
}

}  // namespace bellforge
