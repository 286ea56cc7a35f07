#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace bellforge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Operators are plain dense matrices; role flags are checked on demand with
// is_hermitian / is_unitary / is_projector.
using Operator = Mat;

inline constexpr double kTol = 1e-9;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kKernelTol = 1e-10;

enum class Role { alice, bob, env, ancilla };

struct Subsystem {
    std::string label;
    std::size_t dim = 2;
    Role role = Role::ancilla;
};

// Ordered subsystems; the first subsystem is the most significant index.
struct Layout {
    std::vector<Subsystem> parts;

    std::size_t total() const;
    std::size_t index_of(const std::string& label) const;
    std::vector<std::size_t> indices(Role role) const;
    std::size_t block_dim(Role role) const;
    bool operator==(const Layout& other) const;
};

struct StateVector {
    Layout layout;
    Vec amp;

    double norm() const { return amp.norm(); }
    void validate(bool normalized) const;
};

Mat identity(std::size_t d);
Mat tensor_product(const std::vector<Mat>& ops);
Vec kron(const Vec& a, const Vec& b);
Mat outer(const Vec& u, const Vec& v);

bool is_hermitian(const Mat& m, double tol = kHermTol);
bool is_unitary(const Mat& m, double tol = kTol);
bool is_projector(const Mat& m, double tol = kTol);

// Offset of every multi-index over `sub` (first entry most significant).
std::vector<std::size_t> offsets(const Layout& layout, const std::vector<std::size_t>& sub);
std::vector<std::size_t> complement(const Layout& layout, const std::vector<std::size_t>& sub);

void apply_op(Vec& v, const Layout& layout, const std::vector<std::size_t>& targets, const Mat& m);
Vec applied(const Vec& v, const Layout& layout, const std::vector<std::size_t>& targets, const Mat& m);
Mat embed(const Mat& m, const Layout& layout, const std::vector<std::size_t>& targets);
Vec permute(const Vec& v, const Layout& layout, const std::vector<std::size_t>& order);

Mat partial_trace(const Mat& rho, const Layout& layout, const std::vector<std::string>& keep);
Mat partial_trace_idx(const Mat& rho, const Layout& layout, const std::vector<std::size_t>& keep);
Mat reduced_density(const Vec& v, const Layout& layout, const std::vector<std::size_t>& keep);

std::vector<double> hermitian_eigenvalues(const Mat& h);
double operator_norm(const Mat& m);
double trace_norm(const Mat& m);
Mat regularize(const Mat& t);

double vector_distance(const StateVector& u, const StateVector& v);
double pure_trace_distance(const Vec& u, const Vec& v);
double pure_trace_distance(const StateVector& u, const StateVector& v);

}  // namespace bellforge
