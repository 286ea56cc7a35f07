#include "bellforge/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bellforge {

std::size_t Layout::total() const {
    std::size_t t = 1;
    for (const auto& p : parts) t *= p.dim;
    return t;
}

std::size_t Layout::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].label == label) return i;
    throw std::invalid_argument("unknown subsystem label: " + label);
}

std::vector<std::size_t> Layout::indices(Role role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].role == role) out.push_back(i);
    return out;
}

std::size_t Layout::block_dim(Role role) const {
    std::size_t d = 1;
    for (const auto& p : parts)
        if (p.role == role) d *= p.dim;
    return d;
}

bool Layout::operator==(const Layout& other) const {
    if (parts.size() != other.parts.size()) return false;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].label != other.parts[i].label || parts[i].dim != other.parts[i].dim) return false;
    return true;
}

void StateVector::validate(bool normalized) const {
    if (static_cast<std::size_t>(amp.size()) != layout.total())
        throw std::invalid_argument("state length does not match layout");
    double nv = amp.norm();
    if (normalized && std::abs(nv - 1.0) > kTol) throw std::invalid_argument("state is not normalized");
    if (!normalized && nv > 1.0 + kTol) throw std::invalid_argument("state norm exceeds one");
}

Mat identity(std::size_t d) { return Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)); }

Mat tensor_product(const std::vector<Mat>& ops) {
    if (ops.empty()) throw std::invalid_argument("tensor_product of empty list");
    Mat out = ops.front();
    for (std::size_t k = 1; k < ops.size(); ++k) {
        const Mat& b = ops[k];
        Mat r(out.rows() * b.rows(), out.cols() * b.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = out(i, j) * b;
        out = std::move(r);
    }
    return out;
}

Vec kron(const Vec& a, const Vec& b) {
    Vec r(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a(i) * b;
    return r;
}

Mat outer(const Vec& u, const Vec& v) { return u * v.adjoint(); }

bool is_hermitian(const Mat& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    return true;
}

bool is_unitary(const Mat& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return operator_norm(m.adjoint() * m - identity(m.rows())) <= tol;
}

bool is_projector(const Mat& m, double tol) {
    if (!is_hermitian(m, std::max(tol, kHermTol))) return false;
    return operator_norm(m * m - m) <= tol;
}

std::vector<std::size_t> offsets(const Layout& layout, const std::vector<std::size_t>& sub) {
    const auto& parts = layout.parts;
    std::vector<std::size_t> stride(parts.size());
    std::size_t s = 1;
    for (std::size_t i = parts.size(); i-- > 0;) {
        stride[i] = s;
        s *= parts[i].dim;
    }
    std::vector<std::size_t> out{0};
    for (std::size_t k : sub) {
        if (k >= parts.size()) throw std::invalid_argument("subsystem index out of range");
        std::vector<std::size_t> next;
        next.reserve(out.size() * parts[k].dim);
        for (std::size_t o : out)
            for (std::size_t d = 0; d < parts[k].dim; ++d) next.push_back(o + d * stride[k]);
        out = std::move(next);
    }
    return out;
}

std::vector<std::size_t> complement(const Layout& layout, const std::vector<std::size_t>& sub) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < layout.parts.size(); ++i)
        if (std::find(sub.begin(), sub.end(), i) == sub.end()) rest.push_back(i);
    return rest;
}

void apply_op(Vec& v, const Layout& layout, const std::vector<std::size_t>& targets, const Mat& m) {
    auto toff = offsets(layout, targets);
    auto roff = offsets(layout, complement(layout, targets));
    const auto dt = static_cast<Eigen::Index>(toff.size());
    if (m.rows() != dt || m.cols() != dt) throw std::invalid_argument("operator does not match target dimension");
    if (static_cast<std::size_t>(v.size()) != layout.total()) throw std::invalid_argument("vector does not match layout");
    std::vector<cplx> x(toff.size()), y(toff.size());
    for (std::size_t base : roff) {
        for (Eigen::Index t = 0; t < dt; ++t) x[t] = v(base + toff[t]);
        for (Eigen::Index r = 0; r < dt; ++r) {
            cplx acc = 0;
            for (Eigen::Index c = 0; c < dt; ++c) acc += m(r, c) * x[c];
            y[r] = acc;
        }
        for (Eigen::Index t = 0; t < dt; ++t) v(base + toff[t]) = y[t];
    }
}

Vec applied(const Vec& v, const Layout& layout, const std::vector<std::size_t>& targets, const Mat& m) {
    Vec out = v;
    apply_op(out, layout, targets, m);
    return out;
}

Mat embed(const Mat& m, const Layout& layout, const std::vector<std::size_t>& targets) {
    auto toff = offsets(layout, targets);
    auto roff = offsets(layout, complement(layout, targets));
    const auto n = static_cast<Eigen::Index>(layout.total());
    if (m.rows() != static_cast<Eigen::Index>(toff.size())) throw std::invalid_argument("embed dimension mismatch");
    Mat full = Mat::Zero(n, n);
    for (std::size_t base : roff)
        for (std::size_t r = 0; r < toff.size(); ++r)
            for (std::size_t c = 0; c < toff.size(); ++c) full(base + toff[r], base + toff[c]) = m(r, c);
    return full;
}

Vec permute(const Vec& v, const Layout& layout, const std::vector<std::size_t>& order) {
    if (order.size() != layout.parts.size()) throw std::invalid_argument("permutation must list every subsystem");
    auto off = offsets(layout, order);
    Vec out(v.size());
    for (std::size_t i = 0; i < off.size(); ++i) out(i) = v(off[i]);
    return out;
}

Mat partial_trace_idx(const Mat& rho, const Layout& layout, const std::vector<std::size_t>& keep) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("partial_trace of non-square operator");
    if (static_cast<std::size_t>(rho.rows()) != layout.total())
        throw std::invalid_argument("partial_trace dimension does not match layout");
    auto koff = offsets(layout, keep);
    auto toff = offsets(layout, complement(layout, keep));
    Mat out = Mat::Zero(koff.size(), koff.size());
    for (std::size_t i = 0; i < koff.size(); ++i)
        for (std::size_t j = 0; j < koff.size(); ++j) {
            cplx acc = 0;
            for (std::size_t t : toff) acc += rho(koff[i] + t, koff[j] + t);
            out(i, j) = acc;
        }
    return out;
}

Mat partial_trace(const Mat& rho, const Layout& layout, const std::vector<std::string>& keep) {
    std::vector<std::size_t> idx;
    for (const auto& label : keep) idx.push_back(layout.index_of(label));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return partial_trace_idx(rho, layout, idx);
}

Mat reduced_density(const Vec& v, const Layout& layout, const std::vector<std::size_t>& keep) {
    auto koff = offsets(layout, keep);
    auto toff = offsets(layout, complement(layout, keep));
    Mat m(koff.size(), toff.size());
    for (std::size_t i = 0; i < koff.size(); ++i)
        for (std::size_t t = 0; t < toff.size(); ++t) m(i, t) = v(koff[i] + toff[t]);
    return m * m.adjoint();
}

std::vector<double> hermitian_eigenvalues(const Mat& h) {
    Mat sym = (h + h.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return ev;
}

namespace {
bool hermitian_enough(const Mat& m) {
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return is_hermitian(m, kHermTol * scale);
}
}  // namespace

double operator_norm(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("operator_norm of non-square operator");
    if (m.size() == 0) return 0.0;
    if (hermitian_enough(m)) {
        double best = 0;
        for (double e : hermitian_eigenvalues(m)) best = std::max(best, std::abs(e));
        return best;
    }
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double trace_norm(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("trace_norm of non-square operator");
    if (m.size() == 0) return 0.0;
    double s = 0;
    if (hermitian_enough(m)) {
        for (double e : hermitian_eigenvalues(m)) s += std::abs(e);
        return s;
    }
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

Mat regularize(const Mat& t) {
    if (!hermitian_enough(t)) throw std::invalid_argument("regularize requires a Hermitian operator");
    Mat sym = (t + t.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    const auto& ev = es.eigenvalues();
    const Mat& u = es.eigenvectors();
    Vec sign(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) sign(i) = (ev(i) < -kKernelTol) ? -1.0 : 1.0;
    return u * sign.asDiagonal() * u.adjoint();
}

double vector_distance(const StateVector& u, const StateVector& v) {
    if (!(u.layout == v.layout) || u.amp.size() != v.amp.size()) throw std::invalid_argument("layout mismatch");
    return (u.amp - v.amp).norm();
}

double pure_trace_distance(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
    double nu = u.norm(), nv = v.norm();
    if (nu > 1.0 + kTol || nv > 1.0 + kTol) throw std::invalid_argument("over-normalized vector");
    if (nu == 0.0) return 0.5 * nv * nv;
    // |u><u| - |v><v| restricted to span{u, v}
    Vec e1 = u / nu;
    cplx c1 = e1.dot(v);
    Vec w = v - c1 * e1;
    double c2 = w.norm();
    double a = nu * nu - std::norm(c1);
    cplx b = -c1 * c2;
    double d = -c2 * c2;
    double mid = 0.5 * (a + d);
    double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    return 0.5 * (std::abs(mid + rad) + std::abs(mid - rad));
}

double pure_trace_distance(const StateVector& u, const StateVector& v) {
    if (!(u.layout == v.layout)) throw std::invalid_argument("layout mismatch");
    return pure_trace_distance(u.amp, v.amp);
}

}  // namespace bellforge
