#include "bellforge/prepare.hpp"

#include "bellforge/selftest.hpp"
#include "bellforge/util.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace bellforge {

namespace {

Strategy dense_of(const Strategy& s) { return s.dense ? s : densify(s); }

Vec alice_apply(const DenseModel& d, const Mat& a, const Vec& v) {
    Vec out = Vec::Zero(v.size());
    for (std::size_t e = 0; e < d.dE; ++e)
        for (std::size_t i = 0; i < d.dA; ++i)
            for (std::size_t k = 0; k < d.dA; ++k) {
                const cplx c = a(i, k);
                if (c == cplx{}) continue;
                for (std::size_t b = 0; b < d.dB; ++b) out((i * d.dB + b) * d.dE + e) += c * v((k * d.dB + b) * d.dE + e);
            }
    return out;
}

Mat bob_marginal(const DenseModel& d, const Vec& v) {
    Mat rho = Mat::Zero(d.dB, d.dB);
    for (std::size_t e = 0; e < d.dE; ++e) {
        Mat blk(d.dA, d.dB);
        for (std::size_t a = 0; a < d.dA; ++a)
            for (std::size_t b = 0; b < d.dB; ++b) blk(a, b) = v((a * d.dB + b) * d.dE + e);
        rho += blk.transpose() * blk.conjugate();
    }
    return rho;
}

void check_outcomes(const Question& chi, const Outcomes& a) {
    if (a.size() != chi.size()) throw std::invalid_argument("outcome length does not match the question");
    for (int v : a)
        if (v != 1 && v != -1) throw std::invalid_argument("outcomes must be +1 or -1");
}

}  // namespace

std::size_t outcome_index(const Outcomes& a) {
    std::size_t idx = 0;
    for (int v : a) idx = (idx << 1) | (v < 0 ? 1U : 0U);
    return idx;
}

Outcomes outcome_from_index(std::size_t idx, int n) {
    Outcomes a(n);
    for (int j = 0; j < n; ++j) a[j] = ((idx >> (n - 1 - j)) & 1U) ? -1 : 1;
    return a;
}

Mat post_measurement_rho(const Strategy& s0, const QuestionSet& specials, const Question& chi, const Outcomes& a) {
    if (!specials.contains(chi)) throw std::invalid_argument("question " + to_string(chi) + " is not special");
    check_outcomes(chi, a);
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    Family fam = alice_family(s, chi);
    Vec projected = alice_apply(d, fam.at(outcome_index(a)), d.psi);
    const double p = projected.squaredNorm();
    if (p < kNegligibleProbability)
        throw std::domain_error("outcome " + outcome_string(a) + " has zero probability for " + to_string(chi));
    return bob_marginal(d, projected) / p;
}

Mat ideal_target(const Question& chi, const Outcomes& a, const Mat& beta0, const Mat& beta1) {
    check_outcomes(chi, a);
    if (beta0.rows() != beta1.rows()) throw std::invalid_argument("beta operators differ in dimension");
    const double tr = (beta0.trace() + beta1.trace()).real();
    if (std::abs(tr - 1.0) > 1e-9) throw std::invalid_argument("beta traces must sum to 1");
    const Outcomes flipped = conjugate_outcomes(a, chi);
    Mat flag0 = Mat::Zero(2, 2), flag1 = Mat::Zero(2, 2);
    flag0(0, 0) = 1.0;
    flag1(1, 1) = 1.0;
    std::vector<Mat> f0{beta0}, f1{beta1};
    for (std::size_t j = 0; j < chi.size(); ++j) {
        f0.push_back(eigenprojector(chi[j], a[j]));
        f0.push_back(flag0);
        f1.push_back(eigenprojector(chi[j], flipped[j]));
        f1.push_back(flag1);
    }
    return tensor_product(f0) + tensor_product(f1);
}

PrepReport prep_distance_report(const Strategy& s0, const QuestionSet& specials, const Question& chi,
                                std::optional<double> threshold) {
    Strategy s = dense_of(s0);
    const auto& d = *s.dense;
    const int n = s.n;
    IsometryResult iso = apply_isometry(s, specials, chi);
    Mat va = alice_isometry(s, chi);

    PrepReport r;
    r.chi = chi;
    const double w = iso.junk_weights[0] + iso.junk_weights[1];
    if (w < kNegligibleProbability) throw std::domain_error("junk states vanish; no reference mixture");
    Mat beta0 = bob_marginal(d, iso.junk_plus) / w;
    Mat beta1 = bob_marginal(d, iso.junk_minus) / w;
    r.beta0_trace = beta0.trace().real();
    r.beta1_trace = beta1.trace().real();

    double sq = 0.0;
    for (const auto& [key, dist] : iso.product_distances) {
        r.gamma = std::max(r.gamma, dist);
        sq += dist * dist;
    }
    const std::size_t count = std::size_t{1} << n;
    r.delta_avg = std::sqrt(sq / static_cast<double>(count));
    r.threshold = threshold.value_or(std::pow(r.gamma, 2.0 / 3.0));
    r.bound = 4.0 * std::pow(r.gamma, 2.0 / 3.0);
    r.full_threshold = std::pow(r.delta_avg, 2.0 / 3.0);
    r.full_bound = 4.0 * std::pow(r.delta_avg, 2.0 / 3.0);

    // reference vectors M'^s psi' for every s, then v_a by the sign transform
    std::vector<Vec> refs(count);
    parallel_for(count, [&](std::size_t bits) {
        std::vector<Mat> ops(n);
        int zflips = 0;
        for (int j = 1; j <= n; ++j)
            if ((bits >> (n - j)) & 1U) {
                ops[j - 1] = pauli(chi[j - 1]);
                if (chi[j - 1] == kZ) ++zflips;
            }
        refs[bits] = reference_vector(n, iso.junk_plus, iso.junk_minus, ops, {1.0, zflips % 2 ? -1.0 : 1.0});
    });

    Family fam = alice_family(s, chi);
    r.per_outcome.resize(count);
    parallel_for(count, [&](std::size_t idx) {
        OutcomeRow& row = r.per_outcome[idx];
        row.a = outcome_from_index(idx, n);
        Vec projected = alice_apply(d, fam.at(idx), d.psi);
        row.p = projected.squaredNorm();
        if (row.p < kNegligibleProbability) {
            row.excluded = true;
            return;
        }
        Mat rho = bob_marginal(d, projected) / row.p;
        Mat lifted = iso.vb * rho * iso.vb.adjoint();
        row.D = 0.5 * trace_norm(lifted - ideal_target(chi, row.a, beta0, beta1));

        Vec u = apply_local_isometry(va, iso.vb, n, d, projected);
        Vec v = Vec::Zero(u.size());
        for (std::size_t bits = 0; bits < count; ++bits) {
            const bool odd = std::popcount(idx & bits) % 2 == 1;
            v += (odd ? -1.0 : 1.0) * refs[bits];
        }
        v /= static_cast<double>(count);
        row.D_full = v.norm() < kNegligibleProbability ? 1.0 : normalized_trace_distance(u, v);
    });

    for (const auto& row : r.per_outcome) {
        r.probability_sum += row.p;
        if (row.excluded) continue;
        if (row.D > r.threshold) r.exceed_probability += row.p;
        if (row.D_full > r.full_threshold) r.full_exceed_probability += row.p;
    }
    return r;
}

double projector_trace_distance(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw std::invalid_argument("vector length mismatch");
    return 0.5 * trace_norm(u * u.adjoint() - v * v.adjoint());
}

double normalized_trace_distance(const Vec& u, const Vec& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return pure_trace_distance(Vec(u / nu), Vec(v / nv));
}

double family_delta(const SyntheticFamily& f) {
    double total = 0.0;
    for (std::size_t sg = 0; sg < f.pi.size(); ++sg) {
        double inner = 0.0;
        for (std::size_t om = 0; om < f.u[sg].size(); ++om) inner += (f.u[sg][om] - f.v[sg][om]).squaredNorm();
        total += f.pi[sg] * inner;
    }
    return std::sqrt(total);
}

RobustProbResult robust_prob_oracle(const SyntheticFamily& f, double delta, double c) {
    if (f.u.size() != f.pi.size() || f.v.size() != f.pi.size()) throw std::invalid_argument("family shape mismatch");
    if (c <= 0.0) throw std::invalid_argument("exponent c must be positive");
    RobustProbResult r;
    const double lhs = family_delta(f);
    r.hypothesis_lhs = lhs * lhs;
    r.hypothesis_ok = r.hypothesis_lhs <= delta * delta * (1.0 + 1e-12) + 1e-15;
    const double cut = std::pow(delta, c);
    double within = 0.0, mass = 0.0;
    for (std::size_t sg = 0; sg < f.pi.size(); ++sg) {
        if (f.u[sg].size() != f.v[sg].size()) throw std::invalid_argument("family shape mismatch");
        for (std::size_t om = 0; om < f.u[sg].size(); ++om) {
            const double p = f.pi[sg] * f.u[sg][om].squaredNorm();
            mass += p;
            if (p <= 0.0) continue;
            const double dist = normalized_trace_distance(f.u[sg][om], f.v[sg][om]);
            if (dist <= cut) within += p;
        }
    }
    r.probability_within = mass > 0.0 ? within / mass : 1.0;
    r.exceed_fraction = 1.0 - r.probability_within;
    r.bound = 4.0 * std::pow(delta, 2.0 * (1.0 - c));
    r.holds = r.probability_within >= 1.0 - r.bound - 1e-12;
    return r;
}

SyntheticFamily random_family(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_sigma(1, 4), n_omega(1, 6), n_dim(1, 4);
    std::normal_distribution<double> gauss;
    SyntheticFamily f;
    const int ns = n_sigma(rng), no = n_omega(rng);
    const auto dim = static_cast<std::size_t>(n_dim(rng));
    double tot = 0.0;
    for (int i = 0; i < ns; ++i) {
        f.pi.push_back(uniform01(rng) + 0.05);
        tot += f.pi.back();
    }
    for (double& p : f.pi) p /= tot;
    // perturbation scale between 1e-4 and 1
    const double scale = std::pow(10.0, -4.0 * uniform01(rng));
    f.u.resize(ns);
    f.v.resize(ns);
    for (int i = 0; i < ns; ++i) {
        double norm_sq = 0.0;
        for (int k = 0; k < no; ++k) {
            Vec x = random_state(dim, rng) * (uniform01(rng) + 0.01);
            f.u[i].push_back(x);
            norm_sq += x.squaredNorm();
        }
        for (auto& x : f.u[i]) x /= std::sqrt(norm_sq);
        for (const auto& x : f.u[i]) {
            Vec noise(dim);
            for (std::size_t t = 0; t < dim; ++t) noise(t) = cplx{gauss(rng), gauss(rng)};
            f.v[i].push_back(x + scale * noise / std::sqrt(static_cast<double>(2 * dim * no)));
        }
    }
    return f;
}

}  // namespace bellforge
