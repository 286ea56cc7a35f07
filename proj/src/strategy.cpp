#include "bellforge/strategy.hpp"

#include "bellforge/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bellforge {

using json = nlohmann::json;

namespace {

const double kR2 = 1.0 / std::numbers::sqrt2;

int sign_of_bit(std::size_t index, int len, int pos) {
    // pos is 1-based, position 1 is the most significant bit
    return ((index >> (len - pos)) & 1U) ? -1 : 1;
}

int digit_of(std::size_t index, int len, int k) {
    std::size_t shift = 1;
    for (int i = 0; i < len - k; ++i) shift *= 4;
    return static_cast<int>((index / shift) % 4) + 1;
}

std::size_t pow_size(std::size_t base, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= base;
    return r;
}

Mat local_bob(int y) {
    const Mat x = pauli(kX), yy = pauli(kY), z = pauli(kZ);
    switch (y) {
        case 1: return kR2 * (z + x);
        case 2: return kR2 * (z - x);
        case 3: return kR2 * (z + yy);
        case 4: return kR2 * (z - yy);
        case 5: return kR2 * (x + yy);
        case 6: return kR2 * (x - yy);
        default: throw std::invalid_argument("Bob question must be in 1..6");
    }
}

Layout role_layout(const Layout& l, Role role) {
    Layout out;
    for (const auto& p : l.parts)
        if (p.role == role) out.parts.push_back(p);
    return out;
}

void check_family(const Family& f, std::size_t d, const std::string& name) {
    if (f.empty()) throw std::invalid_argument("projector family '" + name + "' is empty");
    Mat sum = Mat::Zero(d, d);
    for (std::size_t a = 0; a < f.size(); ++a) {
        if (static_cast<std::size_t>(f[a].rows()) != d || static_cast<std::size_t>(f[a].cols()) != d)
            throw std::invalid_argument("projector family '" + name + "' has wrong dimension");
        if (!is_projector(f[a])) throw std::invalid_argument("family '" + name + "' contains a non-projector");
        for (std::size_t b = a + 1; b < f.size(); ++b)
            if ((f[a] * f[b]).cwiseAbs().maxCoeff() > kTol)
                throw std::invalid_argument("family '" + name + "' is not pairwise orthogonal");
        sum += f[a];
    }
    if ((sum - identity(d)).cwiseAbs().maxCoeff() > kTol)
        throw std::invalid_argument("family '" + name + "' does not sum to identity");
}

Mat signed_marginal(const Family& f, int len, int pos) {
    Mat m = Mat::Zero(f.front().rows(), f.front().cols());
    for (std::size_t a = 0; a < f.size(); ++a) m += static_cast<double>(sign_of_bit(a, len, pos)) * f[a];
    return m;
}

Family product_family(const std::vector<Mat>& local) {
    const int n = static_cast<int>(local.size());
    Family f(std::size_t{1} << n);
    for (std::size_t a = 0; a < f.size(); ++a) {
        std::vector<Mat> parts;
        for (int j = 1; j <= n; ++j) parts.push_back(sign_projector(local[j - 1], sign_of_bit(a, n, j)));
        f[a] = tensor_product(parts);
    }
    return f;
}

Family bell_family(const PairModel& p, int n, bool filled) {
    const int len = static_cast<int>(filled ? filled_length(n) : lozenge_length(n));
    Family f(pow_size(4, len));
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        std::vector<Mat> parts;
        int pos = 1;
        if (filled) {
            parts.push_back(identity(2));
            pos = 2;
        }
        for (int k = 1; k <= len; ++k) {
            parts.push_back(p.gamma[pos - 1][digit_of(idx, len, k) - 1]);
            pos += 2;
        }
        for (; pos <= n; ++pos) parts.push_back(identity(2));
        f[idx] = tensor_product(parts);
    }
    return f;
}

double real_trace(const Mat& rho, const Mat& op) {
    return (rho * op).trace().real();
}

std::vector<double> to_cdf(std::vector<double> p) {
    double total = 0;
    for (auto& v : p) {
        if (v < 0) v = 0;
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) throw std::runtime_error("outcome probabilities do not sum to one");
    double acc = 0;
    for (auto& v : p) {
        acc += v / total;
        v = acc;
    }
    p.back() = 1.0;
    return p;
}

const std::shared_ptr<const DenseModel>& require_dense(const Strategy& s) {
    if (!s.dense) throw std::logic_error("operation requires the dense model; call densify first");
    return s.dense;
}

}  // namespace

Mat DenseModel::psi_block(std::size_t e) const {
    Mat m(dA, dB);
    for (std::size_t a = 0; a < dA; ++a)
        for (std::size_t b = 0; b < dB; ++b) m(a, b) = psi((a * dB + b) * dE + e);
    return m;
}

std::size_t lozenge_length(int n) { return static_cast<std::size_t>(n / 2); }
std::size_t filled_length(int n) { return static_cast<std::size_t>((n + 1) / 2 - 1); }

void Strategy::validate() const {
    if (n < 1) throw std::invalid_argument("strategy needs n >= 1");
    if (pairs) {
        const auto& p = *pairs;
        if (p.rho.size() != static_cast<std::size_t>(n) || p.alice.size() != p.rho.size() || p.bob.size() != p.rho.size() ||
            p.gamma.size() != static_cast<std::size_t>(n - 1))
            throw std::invalid_argument("pair model has wrong number of pairs");
        for (int j = 0; j < n; ++j) {
            if (std::abs(p.rho[j].trace() - 1.0) > kTol || !is_hermitian(p.rho[j], kTol))
                throw std::invalid_argument("pair state is not a density operator");
            for (const auto& a : p.alice[j])
                if (!is_hermitian(a, kTol) || !is_unitary(a)) throw std::invalid_argument("Alice observable is not an involution");
            for (const auto& b : p.bob[j])
                if (!is_hermitian(b, kTol) || !is_unitary(b)) throw std::invalid_argument("Bob observable is not an involution");
        }
        for (int j = 0; j + 1 < n; ++j) check_family(Family(p.gamma[j].begin(), p.gamma[j].end()), 4, "gamma");
    }
    if (dense) {
        const auto& d = *dense;
        if (static_cast<std::size_t>(d.psi.size()) != d.dA * d.dB * d.dE) throw std::invalid_argument("state size mismatch");
        if (std::abs(d.psi.norm() - 1.0) > kTol) throw std::invalid_argument("state is not normalized");
        const std::size_t outs = std::size_t{1} << n;
        for (const auto& [x, f] : d.alice) {
            if (f.size() != outs) throw std::invalid_argument("Alice family for " + to_string(x) + " has wrong size");
            check_family(f, d.dA, "alice " + to_string(x));
        }
        if (d.alice_default) {
            if (d.alice_default->size() != outs) throw std::invalid_argument("default Alice family has wrong size");
            check_family(*d.alice_default, d.dA, "alice default");
        }
        for (int y = 1; y <= 6; ++y) {
            if (d.bob[y - 1].size() != outs) throw std::invalid_argument("Bob family " + std::to_string(y) + " has wrong size");
            check_family(d.bob[y - 1], d.dB, std::to_string(y));
        }
        if (d.lozenge.size() != pow_size(4, lozenge_length(n))) throw std::invalid_argument("family 'lozenge' has wrong size");
        if (d.filled.size() != pow_size(4, filled_length(n))) throw std::invalid_argument("family 'filled' has wrong size");
        check_family(d.lozenge, d.dB, "lozenge");
        check_family(d.filled, d.dB, "filled");
    }
    if (!pairs && !dense) throw std::invalid_argument("strategy has no model");
}

Strategy honest_strategy(int n) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    PairModel p;
    Vec phi = phi_plus();
    std::array<Mat, 5> alice{pauli(kX), -pauli(kY), pauli(kZ), pauli(kXMinusY), pauli(kXPlusY)};
    std::array<Mat, 6> bob;
    for (int y = 1; y <= 6; ++y) bob[y - 1] = local_bob(y);
    std::array<Mat, 4> gamma{bell_projector(1), bell_projector(2), bell_projector(3), bell_projector(4)};
    for (int j = 0; j < n; ++j) {
        p.rho.push_back(phi * phi.adjoint());
        p.alice.push_back(alice);
        p.bob.push_back(bob);
        if (j + 1 < n) p.gamma.push_back(gamma);
    }
    Strategy s;
    s.n = n;
    s.pairs = std::move(p);
    return s;
}

Strategy depolarize(const Strategy& s, const NoiseSpec& spec) {
    if (!s.pairs) throw std::invalid_argument("depolarize requires a factorized strategy");
    if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw std::invalid_argument("noise probability must lie in [0,1]");
    Strategy out;
    out.n = s.n;
    out.pairs = s.pairs;
    if (spec.kind == NoiseSpec::Kind::none) return out;
    for (auto& r : out.pairs->rho) r = (1.0 - spec.p) * r + spec.p * identity(4) / 4.0;
    return out;
}

Strategy densify(const Strategy& s) {
    if (s.dense) return s;
    if (!s.pairs) throw std::invalid_argument("strategy has no model");
    const int n = s.n;
    if (n > 6) throw std::invalid_argument("dense model limited to n <= 6");
    const auto& p = *s.pairs;

    // Purify each pair onto an environment register sized by its rank.
    Layout product;
    Vec amp = Vec::Ones(1);
    std::vector<std::size_t> env_dims;
    for (int j = 1; j <= n; ++j) {
        Eigen::SelfAdjointEigenSolver<Mat> es((p.rho[j - 1] + p.rho[j - 1].adjoint()) / 2.0);
        std::vector<int> keep;
        for (int k = 3; k >= 0; --k)
            if (es.eigenvalues()(k) > 1e-14) keep.push_back(k);
        Vec pj = Vec::Zero(static_cast<Eigen::Index>(4 * keep.size()));
        for (std::size_t e = 0; e < keep.size(); ++e) {
            double lam = es.eigenvalues()(keep[e]);
            for (int ab = 0; ab < 4; ++ab)
                pj(static_cast<Eigen::Index>(ab * keep.size() + e)) = std::sqrt(lam) * es.eigenvectors()(ab, keep[e]);
        }
        product.parts.push_back({"A" + std::to_string(j), 2, Role::alice});
        product.parts.push_back({"B" + std::to_string(j), 2, Role::bob});
        product.parts.push_back({"E" + std::to_string(j), keep.size(), Role::env});
        env_dims.push_back(keep.size());
        amp = kron(amp, pj);
    }
    std::vector<std::size_t> order;
    for (int j = 0; j < n; ++j) order.push_back(3 * j);
    for (int j = 0; j < n; ++j) order.push_back(3 * j + 1);
    for (int j = 0; j < n; ++j) order.push_back(3 * j + 2);
    Vec psi = permute(amp, product, order);

    auto d = std::make_shared<DenseModel>();
    for (std::size_t i : order)
        if (product.parts[i].role != Role::env || product.parts[i].dim > 1) d->layout.parts.push_back(product.parts[i]);
    d->psi = psi;
    d->dA = std::size_t{1} << n;
    d->dB = d->dA;
    d->dE = 1;
    for (auto e : env_dims) d->dE *= e;
    d->alice_local = p.alice;
    for (int y = 1; y <= 6; ++y) {
        std::vector<Mat> local;
        for (int j = 0; j < n; ++j) local.push_back(p.bob[j][y - 1]);
        d->bob[y - 1] = product_family(local);
    }
    d->lozenge = bell_family(p, n, false);
    d->filled = bell_family(p, n, true);

    Strategy out = s;
    out.dense = d;
    return out;
}

Strategy conjugate(const Strategy& s) {
    Strategy out;
    out.n = s.n;
    if (s.pairs) {
        PairModel p = *s.pairs;
        for (auto& r : p.rho) r = r.conjugate().eval();
        for (auto& a : p.alice)
            for (auto& m : a) m = m.conjugate().eval();
        for (auto& b : p.bob)
            for (auto& m : b) m = m.conjugate().eval();
        for (auto& g : p.gamma)
            for (auto& m : g) m = m.conjugate().eval();
        out.pairs = std::move(p);
    }
    if (s.dense) {
        auto d = std::make_shared<DenseModel>(*s.dense);
        d->psi = d->psi.conjugate().eval();
        auto conj_family = [](Family& f) {
            for (auto& m : f) m = m.conjugate().eval();
        };
        for (auto& [x, f] : d->alice) conj_family(f);
        if (d->alice_default) conj_family(*d->alice_default);
        for (auto& a : d->alice_local)
            for (auto& m : a) m = m.conjugate().eval();
        for (auto& f : d->bob) conj_family(f);
        conj_family(d->lozenge);
        conj_family(d->filled);
        out.dense = d;
    }
    return out;
}

Mat local_alice(const PairModel& p, const Question& x, int j) {
    if (j < 1 || j > static_cast<int>(p.alice.size())) throw std::out_of_range("position out of range");
    int q = x.at(j - 1);
    if (q < 1 || q > 5) throw std::invalid_argument("question symbol out of range");
    return p.alice[j - 1][q - 1];
}

Mat two_pair_rho(const PairModel& p, int j) {
    Mat joint = tensor_product({p.rho[j - 1], p.rho[j]});  // (A_j, B_j, A_j+1, B_j+1)
    const int perm[4] = {0, 2, 1, 3};
    Mat out(16, 16);
    auto map = [&](int i) {
        int bits[4];
        for (int k = 0; k < 4; ++k) bits[k] = (i >> (3 - k)) & 1;
        int r = 0;
        for (int k = 0; k < 4; ++k) r = (r << 1) | bits[perm[k]];
        return r;
    };
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) out(map(r), map(c)) = joint(r, c);
    return out;
}

Family alice_family(const Strategy& s, const Question& x) {
    if (static_cast<int>(x.size()) != s.n) throw std::invalid_argument("question length mismatch");
    if (!s.dense) return alice_family(densify(s), x);
    const auto& d = *s.dense;
    if (auto it = d.alice.find(x); it != d.alice.end()) return it->second;
    if (!d.alice_local.empty()) {
        std::vector<Mat> local;
        for (int j = 1; j <= s.n; ++j) {
            int q = x[j - 1];
            if (q < 1 || q > 5) throw std::invalid_argument("unknown question " + to_string(x));
            local.push_back(d.alice_local[j - 1][q - 1]);
        }
        return product_family(local);
    }
    if (d.alice_default) return *d.alice_default;
    throw std::invalid_argument("unknown question " + to_string(x));
}

Mat alice_observable(const Strategy& s, const Question& x, int j) {
    if (j < 1 || j > s.n) throw std::out_of_range("position out of range");
    if (static_cast<int>(x.size()) != s.n) throw std::invalid_argument("question length mismatch");
    if (!s.dense) return alice_observable(densify(s), x, j);
    const auto& d = *s.dense;
    if (d.alice.find(x) == d.alice.end() && !d.alice_local.empty()) {
        int q = x[j - 1];
        if (q < 1 || q > 5) throw std::invalid_argument("unknown question " + to_string(x));
        Layout a = role_layout(d.layout, Role::alice);
        return embed(d.alice_local[j - 1][q - 1], a, {static_cast<std::size_t>(j - 1)});
    }
    return signed_marginal(alice_family(s, x), s.n, j);
}

Family bob_family(const Strategy& s, int y) {
    if (!s.dense) return bob_family(densify(s), y);
    const auto& d = *s.dense;
    if (y >= 1 && y <= 6) return d.bob[y - 1];
    if (y == kLozenge) return d.lozenge;
    if (y == kFilled) return d.filled;
    throw std::invalid_argument("invalid Bob question " + std::to_string(y));
}

Mat bob_observable(const Strategy& s, int y, int j) {
    if (y < 1 || y > 6) throw std::invalid_argument("Bob question must be in 1..6");
    if (j < 1 || j > s.n) throw std::out_of_range("position out of range");
    if (!s.dense) return bob_observable(densify(s), y, j);
    return signed_marginal(s.dense->bob[y - 1], s.n, j);
}

Mat bob_combination(const Strategy& s, int q, int j) {
    switch (q) {
        case 1: return kR2 * (bob_observable(s, 5, j) + bob_observable(s, 6, j));
        case 2: return kR2 * (bob_observable(s, 5, j) - bob_observable(s, 6, j));
        case 3: return kR2 * (bob_observable(s, 1, j) + bob_observable(s, 2, j));
        case 4: return bob_observable(s, 5, j);
        case 5: return bob_observable(s, 6, j);
        default: throw std::invalid_argument("combination index must be in 1..5");
    }
}

Mat gamma_projector(const Strategy& s, int j, int b) {
    if (j < 1 || j >= s.n) throw std::out_of_range("Bell position must satisfy 1 <= j < n");
    if (b < 1 || b > 4) throw std::invalid_argument("Bell index must be in 1..4");
    if (!s.dense) return gamma_projector(densify(s), j, b);
    const bool odd = (j % 2) == 1;
    const Family& f = odd ? s.dense->lozenge : s.dense->filled;
    const int len = static_cast<int>(odd ? lozenge_length(s.n) : filled_length(s.n));
    const int k = odd ? (j + 1) / 2 : j / 2;
    Mat g = Mat::Zero(s.dense->dB, s.dense->dB);
    for (std::size_t idx = 0; idx < f.size(); ++idx)
        if (digit_of(idx, len, k) == b) g += f[idx];
    return g;
}

cplx dense_expectation(const DenseModel& d, const Mat& a_op, const Mat& b_op) {
    cplx acc = 0;
    Mat bt = b_op.transpose();
    for (std::size_t e = 0; e < d.dE; ++e) {
        Mat m = d.psi_block(e);
        acc += (m.adjoint() * a_op * m * bt).trace();
    }
    return acc;
}

Vec dense_apply(const DenseModel& d, const Mat& a_op, const Mat& b_op) {
    Vec out(d.psi.size());
    Mat bt = b_op.transpose();
    for (std::size_t e = 0; e < d.dE; ++e) {
        Mat m = a_op * d.psi_block(e) * bt;
        for (std::size_t a = 0; a < d.dA; ++a)
            for (std::size_t b = 0; b < d.dB; ++b) out((a * d.dB + b) * d.dE + e) = m(a, b);
    }
    return out;
}

RoundDistribution round_distribution(const Strategy& s, const Question& x, int y) {
    if (y < 1 || y > kFilled) throw std::invalid_argument("invalid Bob question " + std::to_string(y));
    if (static_cast<int>(x.size()) != s.n) throw std::invalid_argument("question length mismatch");
    RoundDistribution dist;
    dist.n = s.n;
    dist.y = y;
    const int n = s.n;

    if (s.pairs) {
        const auto& p = *s.pairs;
        auto single = [&](int j, bool with_bob) {
            OutcomeGroup g;
            g.alice_pos = {j};
            Mat a = local_alice(p, x, j);
            std::vector<double> prob;
            for (int sa : {1, -1}) {
                Mat pa = sign_projector(a, sa);
                if (!with_bob) {
                    prob.push_back(real_trace(p.rho[j - 1], tensor_product({pa, identity(2)})));
                    continue;
                }
                for (int sb : {1, -1})
                    prob.push_back(real_trace(p.rho[j - 1], tensor_product({pa, sign_projector(p.bob[j - 1][y - 1], sb)})));
            }
            if (with_bob) g.bob_slot = {j};
            g.cdf = to_cdf(std::move(prob));
            return g;
        };
        if (y <= 6) {
            for (int j = 1; j <= n; ++j) dist.groups.push_back(single(j, true));
            return dist;
        }
        const bool filled = y == kFilled;
        const int len = static_cast<int>(filled ? filled_length(n) : lozenge_length(n));
        int pos = 1;
        if (filled && n >= 1) dist.groups.push_back(single(pos++, false));
        for (int k = 1; k <= len; ++k, pos += 2) {
            OutcomeGroup g;
            g.alice_pos = {pos, pos + 1};
            g.bob_slot = {k};
            g.bob_radix = 4;
            Mat r = two_pair_rho(p, pos);
            Mat a1 = local_alice(p, x, pos), a2 = local_alice(p, x, pos + 1);
            std::vector<double> prob;
            for (int s1 : {1, -1})
                for (int s2 : {1, -1})
                    for (int b = 0; b < 4; ++b)
                        prob.push_back(real_trace(
                            r, tensor_product({sign_projector(a1, s1), sign_projector(a2, s2), p.gamma[pos - 1][b]})));
            g.cdf = to_cdf(std::move(prob));
            dist.groups.push_back(std::move(g));
        }
        for (; pos <= n; ++pos) dist.groups.push_back(single(pos, false));
        return dist;
    }

    const auto& d = *require_dense(s);
    Family fa = alice_family(s, x);
    Family fb = bob_family(s, y);
    OutcomeGroup g;
    for (int j = 1; j <= n; ++j) g.alice_pos.push_back(j);
    const int slots = y <= 6 ? n : static_cast<int>(y == kLozenge ? lozenge_length(n) : filled_length(n));
    for (int k = 1; k <= slots; ++k) g.bob_slot.push_back(k);
    g.bob_radix = y <= 6 ? 2 : 4;
    std::vector<double> prob(fa.size() * fb.size(), 0.0);
    std::vector<Mat> fbt;
    for (const auto& m : fb) fbt.push_back(m.transpose());
    for (std::size_t e = 0; e < d.dE; ++e) {
        Mat blk = d.psi_block(e);
        for (std::size_t a = 0; a < fa.size(); ++a) {
            Mat left = fa[a] * blk;
            for (std::size_t b = 0; b < fb.size(); ++b) prob[a * fb.size() + b] += (left * fbt[b]).squaredNorm();
        }
    }
    g.cdf = to_cdf(std::move(prob));
    dist.groups.push_back(std::move(g));
    return dist;
}

RoundOutcome sample(const RoundDistribution& dist, std::mt19937_64& rng) {
    RoundOutcome out;
    out.a.assign(dist.n, 1);
    const std::size_t slots = dist.y <= 6 ? static_cast<std::size_t>(dist.n)
                                          : (dist.y == kLozenge ? lozenge_length(dist.n) : filled_length(dist.n));
    out.b.assign(slots, dist.y <= 6 ? 1 : 1);
    for (const auto& g : dist.groups) {
        double u = uniform01(rng);
        std::size_t idx = static_cast<std::size_t>(std::upper_bound(g.cdf.begin(), g.cdf.end(), u) - g.cdf.begin());
        if (idx >= g.cdf.size()) idx = g.cdf.size() - 1;
        const std::size_t bob_count = pow_size(static_cast<std::size_t>(g.bob_radix), g.bob_slot.size());
        std::size_t ai = idx / bob_count, bi = idx % bob_count;
        const int la = static_cast<int>(g.alice_pos.size()), lb = static_cast<int>(g.bob_slot.size());
        for (int i = 0; i < la; ++i) out.a[g.alice_pos[i] - 1] = sign_of_bit(ai, la, i + 1);
        for (int i = 0; i < lb; ++i)
            out.b[g.bob_slot[i] - 1] = g.bob_radix == 2 ? sign_of_bit(bi, lb, i + 1) : digit_of(bi, lb, i + 1);
    }
    return out;
}

RoundOutcome sample_round(const Strategy& s, const Question& x, int y, std::mt19937_64& rng) {
    return sample(round_distribution(s, x, y), rng);
}

std::string outcome_string(const Outcomes& a) {
    std::string r;
    for (int v : a) r.push_back(v > 0 ? '+' : '-');
    return r;
}

std::string answer_string(int y, const std::vector<int>& b) {
    if (y <= 6) return outcome_string(b);
    std::string r;
    for (int v : b) r.push_back(static_cast<char>('0' + v));
    return r;
}

std::string y_label(int y) {
    if (y >= 1 && y <= 6) return std::to_string(y);
    if (y == kLozenge) return "L";
    if (y == kFilled) return "F";
    throw std::invalid_argument("invalid Bob question " + std::to_string(y));
}

int parse_y(const std::string& s) {
    if (s == "L") return kLozenge;
    if (s == "F") return kFilled;
    if (s.size() == 1 && s[0] >= '1' && s[0] <= '6') return s[0] - '0';
    throw std::invalid_argument("invalid Bob question label '" + s + "'");
}

// JSON serialization ---------------------------------------------------------

namespace {

std::string encode_values(const cplx* data, std::size_t count) {
    std::vector<unsigned char> bytes(count * 16);
    for (std::size_t i = 0; i < count; ++i) {
        double re = data[i].real(), im = data[i].imag();
        std::memcpy(&bytes[16 * i], &re, 8);
        std::memcpy(&bytes[16 * i + 8], &im, 8);
    }
    return base64_encode(bytes);
}

std::vector<cplx> decode_values(const std::string& text) {
    auto bytes = base64_decode(text);
    if (bytes.size() % 16 != 0) throw std::invalid_argument("payload is not a whole number of complex doubles");
    std::vector<cplx> out(bytes.size() / 16);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double re, im;
        std::memcpy(&re, &bytes[16 * i], 8);
        std::memcpy(&im, &bytes[16 * i + 8], 8);
        out[i] = {re, im};
    }
    return out;
}

std::string encode_matrix(const Mat& m) {
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    return encode_values(rm.data(), static_cast<std::size_t>(rm.size()));
}

Mat decode_matrix(const std::string& text, std::size_t d, const std::string& name) {
    auto v = decode_values(text);
    if (v.size() != d * d) throw std::invalid_argument("matrix in '" + name + "' has wrong size");
    Mat m(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = v[r * d + c];
    return m;
}

json encode_family(const Family& f) {
    json arr = json::array();
    for (const auto& m : f) arr.push_back(encode_matrix(m));
    return arr;
}

Family decode_family(const json& j, std::size_t d, const std::string& name) {
    if (!j.is_array()) throw std::invalid_argument("family '" + name + "' must be an array");
    Family f;
    for (const auto& e : j) f.push_back(decode_matrix(e.get<std::string>(), d, name));
    return f;
}

}  // namespace

Strategy strategy_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed strategy file: ") + e.what());
    }
    if (!j.contains("n") || !j.contains("dims") || !j.contains("psi") || !j.contains("bob"))
        throw std::invalid_argument("strategy file needs n, dims, psi and bob");
    Strategy s;
    s.n = j.at("n").get<int>();
    if (s.n < 1) throw std::invalid_argument("n must be at least 1");
    auto d = std::make_shared<DenseModel>();
    d->dA = j.at("dims").at("A").get<std::size_t>();
    d->dB = j.at("dims").at("B").get<std::size_t>();
    d->dE = j.at("dims").value("E", std::size_t{1});
    d->layout.parts.push_back({"A", d->dA, Role::alice});
    d->layout.parts.push_back({"B", d->dB, Role::bob});
    if (d->dE > 1) d->layout.parts.push_back({"E", d->dE, Role::env});
    auto amp = decode_values(j.at("psi").get<std::string>());
    if (amp.size() != d->dA * d->dB * d->dE) throw std::invalid_argument("psi has wrong size for dims");
    d->psi = Eigen::Map<Vec>(amp.data(), static_cast<Eigen::Index>(amp.size()));

    if (j.contains("alice")) {
        const auto& a = j.at("alice");
        if (a.contains("questions"))
            for (const auto& [key, fam] : a.at("questions").items())
                d->alice[parse_question(key)] = decode_family(fam, d->dA, "alice " + key);
        if (a.contains("default")) d->alice_default = decode_family(a.at("default"), d->dA, "alice default");
        if (a.contains("local")) {
            if (d->dA != (std::size_t{1} << s.n)) throw std::invalid_argument("local Alice observables need dim A = 2^n");
            d->layout.parts.erase(d->layout.parts.begin());
            for (int k = s.n; k >= 1; --k) d->layout.parts.insert(d->layout.parts.begin(), {"A" + std::to_string(k), 2, Role::alice});
            for (const auto& pos : a.at("local")) {
                std::array<Mat, 5> obs;
                if (pos.size() != 5) throw std::invalid_argument("local Alice observables need 5 entries per position");
                for (int q = 0; q < 5; ++q) obs[q] = decode_matrix(pos[q].get<std::string>(), 2, "alice local");
                d->alice_local.push_back(obs);
            }
            if (d->alice_local.size() != static_cast<std::size_t>(s.n))
                throw std::invalid_argument("local Alice observables need one entry per position");
        }
    }
    const auto& b = j.at("bob");
    for (int y = 1; y <= 6; ++y) {
        std::string key = std::to_string(y);
        if (!b.contains(key)) throw std::invalid_argument("missing Bob family '" + key + "'");
        d->bob[y - 1] = decode_family(b.at(key), d->dB, key);
    }
    for (const char* key : {"lozenge", "filled"}) {
        const std::size_t len = std::string(key) == "lozenge" ? lozenge_length(s.n) : filled_length(s.n);
        Family f;
        if (b.contains(key)) {
            f = decode_family(b.at(key), d->dB, key);
        } else if (len == 0) {
            f = {identity(d->dB)};
        } else {
            throw std::invalid_argument(std::string("missing Bell family '") + key + "'");
        }
        (std::string(key) == "lozenge" ? d->lozenge : d->filled) = std::move(f);
    }
    s.dense = d;
    s.validate();
    return s;
}

Strategy load_strategy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open strategy file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return strategy_from_json(ss.str());
}

std::string strategy_to_json(const Strategy& s) {
    Strategy full = densify(s);
    const auto& d = *full.dense;
    json j;
    j["format"] = "bellforge-strategy-1";
    j["n"] = full.n;
    j["dims"] = {{"A", d.dA}, {"B", d.dB}, {"E", d.dE}};
    j["psi"] = encode_values(d.psi.data(), static_cast<std::size_t>(d.psi.size()));
    json a = json::object();
    json qs = json::object();
    for (const auto& [x, f] : d.alice) qs[to_string(x)] = encode_family(f);
    a["questions"] = qs;
    if (d.alice_default) a["default"] = encode_family(*d.alice_default);
    if (!d.alice_local.empty()) {
        json local = json::array();
        for (const auto& obs : d.alice_local) {
            json row = json::array();
            for (const auto& m : obs) row.push_back(encode_matrix(m));
            local.push_back(row);
        }
        a["local"] = local;
    }
    j["alice"] = a;
    json b = json::object();
    for (int y = 1; y <= 6; ++y) b[std::to_string(y)] = encode_family(d.bob[y - 1]);
    b["lozenge"] = encode_family(d.lozenge);
    b["filled"] = encode_family(d.filled);
    j["bob"] = b;
    return j.dump(1);
}

// Random strategies ------------------------------------------------------------

namespace {
Mat gaussian(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < c; ++k) m(i, k) = cplx(g(rng), g(rng));
    return m;
}
}  // namespace

Mat random_unitary(std::size_t d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Mat> qr(gaussian(d, d, rng));
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::size_t i = 0; i < d; ++i) {
        cplx di = r(i, i);
        if (std::abs(di) > 0) q.col(i) *= di / std::abs(di);
    }
    return q;
}

Mat random_involution(std::size_t d, std::mt19937_64& rng) {
    Mat u = random_unitary(d, rng);
    Vec sign(d);
    for (std::size_t i = 0; i < d; ++i) sign(i) = (rng() & 1U) ? -1.0 : 1.0;
    return u * sign.asDiagonal() * u.adjoint();
}

Vec random_state(std::size_t d, std::mt19937_64& rng) {
    Vec v = gaussian(d, 1, rng).col(0);
    return v / v.norm();
}

Strategy random_pair_strategy(std::mt19937_64& rng) {
    const std::size_t dims[] = {2, 3, 4};
    auto d = std::make_shared<DenseModel>();
    d->dA = dims[rng() % 3];
    d->dB = dims[rng() % 3];
    d->layout.parts = {{"A", d->dA, Role::alice}, {"B", d->dB, Role::bob}};
    d->psi = random_state(d->dA * d->dB, rng);
    auto pm = [](const Mat& o) { return Family{sign_projector(o, 1), sign_projector(o, -1)}; };
    for (int q = 1; q <= 5; ++q) d->alice[Question{q}] = pm(random_involution(d->dA, rng));
    for (int y = 1; y <= 6; ++y) d->bob[y - 1] = pm(random_involution(d->dB, rng));
    d->lozenge = {identity(d->dB)};
    d->filled = {identity(d->dB)};
    Strategy s;
    s.n = 1;
    s.dense = d;
    return s;
}

}  // namespace bellforge
