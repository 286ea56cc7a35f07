#include "bellforge/selftest.hpp"

#include "bellforge/util.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bellforge {

namespace {

const cplx kI{0.0, 1.0};
const double kR2 = 1.0 / std::numbers::sqrt2;

Strategy dense_of(const Strategy& s) { return s.dense ? s : densify(s); }

void require_special(const QuestionSet& specials, const Question& chi) {
    if (!specials.contains(chi)) throw std::invalid_argument("question " + to_string(chi) + " is not special");
}

// S_q^(j) for the given special question, q = 1..5
Mat alice_s(const Strategy& s, const Question& chi, int j, int q) { return alice_observable(s, with_position(chi, j, q), j); }

Vec on_a(const DenseModel& d, const Mat& a, const Vec& v) {
    DenseModel tmp;
    tmp.dA = d.dA;
    tmp.dB = d.dB;
    tmp.dE = d.dE;
    tmp.psi = v;
    return dense_apply(tmp, a, identity(d.dB));
}

Vec on_b(const DenseModel& d, const Mat& b, const Vec& v) {
    DenseModel tmp;
    tmp.dA = d.dA;
    tmp.dB = d.dB;
    tmp.dE = d.dE;
    tmp.psi = v;
    return dense_apply(tmp, identity(d.dA), b);
}

std::vector<std::array<Mat, 3>> bob_ops(const Strategy& s) {
    std::vector<std::array<Mat, 3>> t(s.n);
    for (int j = 1; j <= s.n; ++j)
        for (int q = 1; q <= 3; ++q) t[j - 1][q - 1] = regularized_Q(s, j, q);
    return t;
}

std::vector<std::array<Mat, 3>> alice_ops(const Strategy& s, const Question& chi) {
    std::vector<std::array<Mat, 3>> t(s.n);
    for (int j = 1; j <= s.n; ++j)
        for (int q = 1; q <= 3; ++q) t[j - 1][q - 1] = alice_s(s, chi, j, q);
    return t;
}

void check_cap(const DenseModel& d, int n) {
    double size = static_cast<double>(d.dA) * static_cast<double>(d.dB) * static_cast<double>(d.dE) * std::pow(16.0, n);
    if (size > static_cast<double>(kDenseIsometryCap))
        throw std::invalid_argument("dense isometry would need " + std::to_string(static_cast<long long>(size)) +
                                    " amplitudes, above the cap of " + std::to_string(kDenseIsometryCap));
}

}  // namespace

Mat regularized_Q(const Strategy& s, int j, int q) {
    if (q < 1 || q > 3) throw std::invalid_argument("regularized combination index must be in 1..3");
    return regularize(bob_combination(s, q, j));
}

double symmetry_bound_factor() { return 2.0; }
double comm_bob_bound_factor() { return 8.0; }
double comm_alice_bound_factor() { return 16.0; }
double acomm_alice_bound_factor() { return 2.0 * (1.0 + std::numbers::sqrt2); }
double acomm_bob_bound_factor(int q, int r) {
    if (q > r) std::swap(q, r);
    if (q == 1 && r == 2) return 2.0 * (3.0 + std::numbers::sqrt2);
    if (q == 1 && r == 3) return 2.0 * (4.0 + std::numbers::sqrt2);
    if (q == 2 && r == 3) return 2.0 * (5.0 + std::numbers::sqrt2);
    throw std::invalid_argument("anticommutator pair must be distinct in 1..3");
}
double conj_bound_factor() { return 21.0; }

RelationReport relation_check(const Strategy& s0, const QuestionSet& specials, const Question& chi) {
    require_special(specials, chi);
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    const int n = s.n;
    auto S = alice_ops(s, chi);
    auto T = bob_ops(s);
    const Vec& psi = d.psi;

    RelationReport r;
    r.chi = chi;
    for (int j = 1; j <= n; ++j)
        for (int q = 1; q <= 3; ++q)
            r.symmetry[{j, q}] = (on_a(d, S[j - 1][q - 1], psi) - on_b(d, T[j - 1][q - 1], psi)).norm();

    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k)
            for (int q = 1; q <= 3; ++q)
                for (int rr = 1; rr <= 3; ++rr) {
                    const Mat& tq = T[j - 1][q - 1];
                    const Mat& tr = T[k - 1][rr - 1];
                    r.comm_bob[{j, k, q, rr}] = on_b(d, tq * tr - tr * tq, psi).norm();
                    const Mat& sq = S[j - 1][q - 1];
                    const Mat& sr = S[k - 1][rr - 1];
                    r.comm_alice[{j, k, q, rr}] = on_a(d, sq * sr - sr * sq, psi).norm();
                }

    for (int j = 1; j <= n; ++j)
        for (int q = 1; q <= 3; ++q)
            for (int rr = q + 1; rr <= 3; ++rr) {
                const Mat& sq = S[j - 1][q - 1];
                const Mat& sr = S[j - 1][rr - 1];
                r.acomm_alice[{j, q, rr}] = on_a(d, sq * sr + sr * sq, psi).norm();
                const Mat& tq = T[j - 1][q - 1];
                const Mat& tr = T[j - 1][rr - 1];
                r.acomm_bob[{j, q, rr}] = on_b(d, tq * tr + tr * tq, psi).norm();
            }

    for (int j = 1; j < n; ++j) {
        Mat prod = S[j - 1][0] * S[j][0] * S[j - 1][1] * S[j][1] * S[j - 1][2] * S[j][2];
        r.conj[j] = on_a(d, identity(d.dA) + prod, psi).norm();
    }

    for (int j = 1; j <= n; ++j) {
        Mat s4 = alice_s(s, chi, j, 4), s5 = alice_s(s, chi, j, 5);
        r.extra_linear[{j, 4}] = on_a(d, s4 - kR2 * (S[j - 1][0] + S[j - 1][1]), psi).norm();
        r.extra_linear[{j, 5}] = on_a(d, s5 - kR2 * (S[j - 1][0] - S[j - 1][1]), psi).norm();
    }

    auto take = [&](const auto& m) {
        for (const auto& [k, v] : m) r.eta = std::max(r.eta, v);
    };
    take(r.symmetry);
    take(r.comm_bob);
    take(r.comm_alice);
    take(r.acomm_alice);
    take(r.acomm_bob);
    take(r.conj);
    return r;
}

std::vector<std::string> relation_violations(const RelationReport& r, double epsilon, double slack) {
    const double se = std::sqrt(std::max(0.0, epsilon));
    std::vector<std::string> out;
    auto check = [&](const std::string& name, double value, double bound) {
        if (value > bound + slack) {
            std::ostringstream os;
            os << name << ": " << value << " > " << bound;
            out.push_back(os.str());
        }
    };
    for (const auto& [k, v] : r.symmetry)
        check("symmetry j=" + std::to_string(k.first) + " q=" + std::to_string(k.second), v, symmetry_bound_factor() * se);
    for (const auto& [k, v] : r.comm_bob) {
        auto [j, kk, q, rr] = k;
        check("comm_bob " + std::to_string(j) + "," + std::to_string(kk) + " q=" + std::to_string(q) + " r=" + std::to_string(rr),
              v, comm_bob_bound_factor() * se);
    }
    for (const auto& [k, v] : r.comm_alice) {
        auto [j, kk, q, rr] = k;
        check("comm_alice " + std::to_string(j) + "," + std::to_string(kk) + " q=" + std::to_string(q) + " r=" +
                  std::to_string(rr),
              v, comm_alice_bound_factor() * se);
    }
    for (const auto& [k, v] : r.acomm_alice) {
        auto [j, q, rr] = k;
        check("acomm_alice j=" + std::to_string(j) + " q=" + std::to_string(q) + " r=" + std::to_string(rr), v,
              acomm_alice_bound_factor() * se);
    }
    for (const auto& [k, v] : r.acomm_bob) {
        auto [j, q, rr] = k;
        check("acomm_bob j=" + std::to_string(j) + " q=" + std::to_string(q) + " r=" + std::to_string(rr), v,
              acomm_bob_bound_factor(q, rr) * se);
    }
    for (const auto& [j, v] : r.conj) check("conj j=" + std::to_string(j), v, conj_bound_factor() * se);
    return out;
}

std::map<std::pair<int, int>, double> global_conj_check(const Strategy& s0) {
    if (s0.n < 2) throw std::invalid_argument("global conjugation check needs n >= 2");
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    auto T = bob_ops(s);
    const Mat id = identity(d.dB);
    std::map<std::pair<int, int>, double> out;
    for (int j = 1; j < s.n; ++j) {
        Mat k1 = id + kI * T[j - 1][1] * T[j - 1][0];
        Mat k2 = id + kI * T[j][1] * T[j][0];
        for (int sign : {1, -1}) {
            Mat op = (id + static_cast<double>(sign) * T[j - 1][2]) * k1 * (id - static_cast<double>(sign) * T[j][2]) * k2;
            out[{j, sign}] = on_b(d, op, d.psi).norm();
        }
    }
    return out;
}

Mat side_isometry(const std::vector<std::array<Mat, 3>>& ops, bool alice_side) {
    if (ops.empty()) throw std::invalid_argument("isometry needs at least one position");
    const auto d = ops.front()[0].rows();
    const Mat id = identity(d);
    std::vector<Mat> g{id};
    for (const auto& o : ops) {
        // swap stage on the primed ancilla, kickback stage on the double-primed one
        Mat u = alice_side ? Mat(-kI * o[1] * o[0]) : Mat(kI * o[1] * o[0]);
        Mat p[2] = {(id + u) / 2.0, o[0] * (id - u) / 2.0};
        Mat rr[2] = {(id + o[2]) / 2.0, (id - o[2]) / 2.0};
        std::vector<Mat> next;
        next.reserve(g.size() * 4);
        for (const auto& prev : g)
            for (int a1 = 0; a1 < 2; ++a1)
                for (int a2 = 0; a2 < 2; ++a2) next.push_back(rr[a2] * p[a1] * prev);
        g = std::move(next);
    }
    const auto c = static_cast<Eigen::Index>(g.size());
    Mat v(d * c, d);
    for (Eigen::Index k = 0; k < c; ++k)
        for (Eigen::Index row = 0; row < d; ++row) v.row(row * c + k) = g[k].row(row);
    return v;
}

Mat alice_isometry(const Strategy& s0, const Question& chi) {
    Strategy s = dense_of(s0);
    return side_isometry(alice_ops(s, chi), true);
}

Mat bob_isometry(const Strategy& s0) {
    Strategy s = dense_of(s0);
    return side_isometry(bob_ops(s), false);
}

Vec apply_local_isometry(const Mat& va, const Mat& vb, int n, const DenseModel& d, const Vec& v) {
    const std::size_t anc = std::size_t{1} << (2 * n);  // 4^n per side
    if (static_cast<std::size_t>(va.rows()) != d.dA * anc || static_cast<std::size_t>(vb.rows()) != d.dB * anc)
        throw std::invalid_argument("isometry dimensions do not match the strategy");
    check_cap(d, n);
    const std::size_t out_anc = anc * anc;
    Vec out = Vec::Zero(static_cast<Eigen::Index>(d.dA * d.dB * d.dE * out_anc));
    // interleave side digits (a'_j a''_j), (b'_j b''_j) into (a'_j b'_j a''_j b''_j)
    std::vector<std::size_t> mix(out_anc);
    for (std::size_t ca = 0; ca < anc; ++ca)
        for (std::size_t cb = 0; cb < anc; ++cb) {
            std::size_t idx = 0;
            for (int j = 1; j <= n; ++j) {
                const int shift = 2 * (n - j);
                std::size_t da = (ca >> shift) & 3U, db = (cb >> shift) & 3U;
                std::size_t nib = ((da >> 1) << 3) | ((db >> 1) << 2) | ((da & 1U) << 1) | (db & 1U);
                idx = (idx << 4) | nib;
            }
            mix[ca * anc + cb] = idx;
        }
    Mat vbt = vb.transpose();
    for (std::size_t e = 0; e < d.dE; ++e) {
        Mat blk(d.dA, d.dB);
        for (std::size_t a = 0; a < d.dA; ++a)
            for (std::size_t b = 0; b < d.dB; ++b) blk(a, b) = v((a * d.dB + b) * d.dE + e);
        Mat r = va * blk * vbt;
        for (std::size_t pa = 0; pa < d.dA; ++pa)
            for (std::size_t ca = 0; ca < anc; ++ca)
                for (std::size_t pb = 0; pb < d.dB; ++pb)
                    for (std::size_t cb = 0; cb < anc; ++cb)
                        out(static_cast<Eigen::Index>(((pa * d.dB + pb) * d.dE + e) * out_anc + mix[ca * anc + cb])) =
                            r(pa * anc + ca, pb * anc + cb);
    }
    return out;
}

std::pair<Vec, Vec> junk_states(const Strategy& s0) {
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    auto T = bob_ops(s);
    const Mat id = identity(d.dB);
    const double scale = 1.0 / (2.0 * std::numbers::sqrt2);
    auto build = [&](int sign) {
        Mat op = id;
        for (int j = 1; j <= s.n; ++j)
            op = op * (scale * (id + static_cast<double>(sign) * T[j - 1][2]) * (id + kI * T[j - 1][1] * T[j - 1][0]));
        return on_b(d, op, d.psi);
    };
    return {build(1), build(-1)};
}

Vec reference_vector(int n, const Vec& xi0, const Vec& xi1, const std::vector<Mat>& ops, std::array<double, 2> sign) {
    if (static_cast<int>(ops.size()) != n) throw std::invalid_argument("need one operator slot per position");
    Vec phi = phi_plus();
    Vec out = Vec::Zero(xi0.size() * static_cast<Eigen::Index>(std::size_t{1} << (4 * n)));
    for (int b = 0; b < 2; ++b) {
        const Vec& xi = b == 0 ? xi0 : xi1;
        if (sign[b] == 0.0 || xi.norm() == 0.0) continue;
        Vec flag = Vec::Zero(4);
        flag(b == 0 ? 0 : 3) = 1.0;
        Vec acc = xi;
        for (int j = 0; j < n; ++j) {
            Vec pair = ops[j].size() == 0 ? phi : Vec(tensor_product({identity(2), ops[j]}) * phi);
            acc = kron(acc, kron(pair, flag));
        }
        out += sign[b] * acc;
    }
    return out;
}

Strategy perturb_alice(const Strategy& s0, double angle) {
    Strategy s = dense_of(s0);
    if (s.dense->alice_local.empty()) throw std::invalid_argument("perturbation needs local Alice observables");
    auto d = std::make_shared<DenseModel>(*s.dense);
    Mat u = Mat::Zero(2, 2);
    u(0, 0) = std::polar(1.0, -angle / 2.0);
    u(1, 1) = std::polar(1.0, angle / 2.0);
    for (auto& local : d->alice_local)
        for (int q : {4, 5}) local[q - 1] = u * local[q - 1] * u.adjoint();
    s.dense = d;
    s.pairs.reset();
    return s;
}

std::uint64_t matrix_fingerprint(const Mat& m) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double re = m(r, c).real(), im = m(r, c).imag();
            h = fnv1a(&re, sizeof re, h);
            h = fnv1a(&im, sizeof im, h);
        }
    return h;
}

std::string bits_string(std::size_t s, int n) {
    std::string out;
    for (int j = 1; j <= n; ++j) out.push_back(((s >> (n - j)) & 1U) ? '1' : '0');
    return out;
}

IsometryResult apply_isometry(const Strategy& s0, const QuestionSet& specials, const Question& chi) {
    require_special(specials, chi);
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    const int n = s.n;
    check_cap(d, n);

    IsometryResult res;
    res.chi = chi;
    Mat va = alice_isometry(s, chi);
    res.vb = bob_isometry(s);
    res.vb_fingerprint = matrix_fingerprint(res.vb);
    std::tie(res.junk_plus, res.junk_minus) = junk_states(s);
    res.junk_weights = {res.junk_plus.squaredNorm(), res.junk_minus.squaredNorm()};

    auto V = [&](const Vec& v) { return apply_local_isometry(va, res.vb, n, d, v); };
    auto ref = [&](const std::vector<Mat>& ops, double branch1_sign) {
        return reference_vector(n, res.junk_plus, res.junk_minus, ops, {1.0, branch1_sign});
    };
    const std::vector<Mat> none(n);

    res.extracted_state_distance = (V(d.psi) - ref(none, 1.0)).norm();

    std::vector<std::pair<std::pair<int, int>, double>> obs;
    for (int k = 1; k <= n; ++k)
        for (int q = 1; q <= 5; ++q) obs.push_back({{k, q}, 0.0});
    parallel_for(obs.size(), [&](std::size_t i) {
        auto [k, q] = obs[i].first;
        std::vector<Mat> ops(n);
        ops[k - 1] = pauli(q);
        Vec target = ref(ops, q == 3 ? -1.0 : 1.0);
        obs[i].second = (V(on_a(d, alice_s(s, chi, k, q), d.psi)) - target).norm();
    });
    for (const auto& [key, v] : obs) res.observable_distances[key] = v;

    for (int k = 1; k <= n; ++k) {
        Mat s1 = alice_s(s, chi, k, 1), s2 = alice_s(s, chi, k, 2);
        for (int q : {4, 5}) {
            std::vector<Mat> ops(n);
            ops[k - 1] = pauli(q);
            Mat lin = kR2 * (s1 + (q == 4 ? 1.0 : -1.0) * s2);
            res.linear_distances[{k, q}] = (V(on_a(d, lin, d.psi)) - ref(ops, 1.0)).norm();
        }
    }

    std::vector<Mat> a_chi(n);
    for (int j = 1; j <= n; ++j) a_chi[j - 1] = alice_observable(s, chi, j);
    const std::size_t count = std::size_t{1} << n;
    std::vector<double> prod(count);
    parallel_for(count, [&](std::size_t bits) {
        Mat op = identity(d.dA);
        std::vector<Mat> ops(n);
        int zflips = 0;
        for (int j = 1; j <= n; ++j)
            if ((bits >> (n - j)) & 1U) {
                op = op * a_chi[j - 1];
                ops[j - 1] = pauli(chi[j - 1]);
                if (chi[j - 1] == kZ) ++zflips;
            }
        prod[bits] = (V(on_a(d, op, d.psi)) - ref(ops, zflips % 2 ? -1.0 : 1.0)).norm();
    });
    for (std::size_t bits = 0; bits < count; ++bits) res.product_distances[bits_string(bits, n)] = prod[bits];
    return res;
}

ProductActionResult product_action_check(const Strategy& s0, const QuestionSet& specials, const Question& chi,
                                         const std::vector<std::pair<int, int>>& ops_in) {
    require_special(specials, chi);
    if (ops_in.empty()) throw std::invalid_argument("need at least one operator");
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    const int n = s.n;
    std::vector<int> seen;
    for (auto [k, q] : ops_in) {
        if (k < 1 || k > n || q < 1 || q > 5) throw std::invalid_argument("operator (k, q) out of range");
        if (std::find(seen.begin(), seen.end(), k) != seen.end())
            throw std::invalid_argument("product action needs distinct positions");
        seen.push_back(k);
    }
    Mat va = alice_isometry(s, chi);
    Mat vb = bob_isometry(s);
    auto [xi0, xi1] = junk_states(s);
    auto V = [&](const Vec& v) { return apply_local_isometry(va, vb, n, d, v); };

    ProductActionResult r;
    r.delta = (V(d.psi) - reference_vector(n, xi0, xi1, std::vector<Mat>(n), {1.0, 1.0})).norm();
    Mat op = identity(d.dA);
    std::vector<Mat> ref_ops(n);
    double sign = 1.0;
    for (auto [k, q] : ops_in) {
        Mat sq = alice_s(s, chi, k, q);
        std::vector<Mat> single(n);
        single[k - 1] = pauli(q);
        double sg = q == 3 ? -1.0 : 1.0;
        r.delta = std::max(r.delta, (V(on_a(d, sq, d.psi)) - reference_vector(n, xi0, xi1, single, {1.0, sg})).norm());
        op = op * sq;
        ref_ops[k - 1] = pauli(q);
        sign *= sg;
    }
    r.distance = (V(on_a(d, op, d.psi)) - reference_vector(n, xi0, xi1, ref_ops, {1.0, sign})).norm();
    r.bound = (2.0 * static_cast<double>(ops_in.size()) + 1.0) * r.delta;
    return r;
}

}  // namespace bellforge
