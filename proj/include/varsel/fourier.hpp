#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "varsel/lattice.hpp"
#include "varsel/multi_index.hpp"

namespace varsel {

// phi_0 = 1; sqrt(2) cos(2 pi k.x) for sign-canonical k, sqrt(2) sin(2 pi k.x)
// otherwise. Together these form the orthonormal trigonometric basis of
// L2([0,1]^d), one function per integer index.
inline double basis_eval(const MultiIndex& k, std::span<const double> x) {
    require(static_cast<std::size_t>(k.dim()) == x.size(), "basis_eval: dimension mismatch");
    if (k.is_zero()) return 1.0;
    double phase = 0.0;
    for (int j = 0; j < k.dim(); ++j)
        phase += static_cast<double>(k[j]) * x[static_cast<std::size_t>(j)];
    phase *= 2.0 * std::numbers::pi;
    return k.sign_canonical() ? std::numbers::sqrt2 * std::cos(phase)
                              : std::numbers::sqrt2 * std::sin(phase);
}

// Finite trigonometric expansion: map from basis index to coefficient.
// Zero-valued coefficients are never stored.
struct SparseFourierFunction {
    int dim = 0;
    std::map<MultiIndex, double> coefficients;

    explicit SparseFourierFunction(int d = 0) : dim(d) {}

    void set(const MultiIndex& k, double value) {
        require(k.dim() == dim, "function: index dimension mismatch");
        if (value == 0.0)
            coefficients.erase(k);
        else
            coefficients[k] = value;
    }

    double coefficient(const MultiIndex& k) const {
        auto it = coefficients.find(k);
        return it == coefficients.end() ? 0.0 : it->second;
    }

    double operator()(std::span<const double> x) const {
        double s = 0.0;
        for (const auto& [k, v] : coefficients) s += v * basis_eval(k, x);
        return s;
    }

    double l2_norm_sq() const {
        double s = 0.0;
        for (const auto& [k, v] : coefficients) s += v * v;
        return s;
    }
};

// Per-coordinate energy diagnostics against the smoothness/relevance class.
struct SmoothnessReport {
    std::vector<double> sobolev_sums;  // sum_k k_j^2 theta_k^2
    std::vector<double> relevance;     // Q_j = sum_{k : k_j != 0} theta_k^2
    std::vector<int> support;          // { j : Q_j > 0 }
    bool sigma_member = false;         // every Sobolev sum <= L
    bool c1_member = false;            // sigma_member, |support| <= dstar, min relevance >= kappa
};

// Exact sums over the stored coefficients. The zero function has empty
// support; its minimal relevance is taken as 0, so it never clears a
// positive kappa.
inline SmoothnessReport analyze(const SparseFourierFunction& f, double kappa, double L,
                                int dstar) {
    SmoothnessReport r;
    r.sobolev_sums.assign(static_cast<std::size_t>(f.dim), 0.0);
    r.relevance.assign(static_cast<std::size_t>(f.dim), 0.0);
    for (const auto& [k, v] : f.coefficients) {
        const double e = v * v;
        for (int j = 0; j < f.dim; ++j) {
            const double kj = static_cast<double>(k[j]);
            if (kj != 0.0) {
                r.sobolev_sums[static_cast<std::size_t>(j)] += kj * kj * e;
                r.relevance[static_cast<std::size_t>(j)] += e;
            }
        }
    }
    double min_rel = 0.0;
    bool first = true;
    for (int j = 0; j < f.dim; ++j) {
        if (r.relevance[static_cast<std::size_t>(j)] > 0.0) {
            r.support.push_back(j);
            min_rel = first ? r.relevance[static_cast<std::size_t>(j)]
                            : std::min(min_rel, r.relevance[static_cast<std::size_t>(j)]);
            first = false;
        }
    }
    r.sigma_member = true;
    for (double s : r.sobolev_sums)
        if (s > L) r.sigma_member = false;
    r.c1_member = r.sigma_member && static_cast<int>(r.support.size()) <= dstar && min_rel >= kappa;
    return r;
}

// theta_{e_j} = a on each coordinate of J: the canonical easy member of the
// class, with per-coordinate relevance and Sobolev sum both a^2 exactly.
inline SparseFourierFunction make_single_frequency_instance(int d, const std::vector<int>& J,
                                                            double amplitude) {
    require(amplitude != 0.0, "instance: amplitude must be nonzero");
    SparseFourierFunction f(d);
    for (int j : J) {
        require(j >= 0 && j < d, "instance: coordinate out of range");
        f.set(MultiIndex::unit(d, j), amplitude);
    }
    return f;
}

// Sign-pattern instance spread over a whole lattice ball: coefficient
// amplitude * signs[i] on the i-th ball index (lexicographic order),
// embedded into the coordinates J. With amplitude = N^{-1/2} every
// relevant coordinate carries relevance exactly 1.
inline SparseFourierFunction make_hard_instance(int d, std::vector<int> J, int gamma,
                                                std::span<const int> signs, double amplitude) {
    require(gamma >= 1, "hard instance: gamma must be a positive integer");
    require(amplitude > 0.0, "hard instance: amplitude must be positive");
    std::sort(J.begin(), J.end());
    J.erase(std::unique(J.begin(), J.end()), J.end());
    require(!J.empty() && J.front() >= 0 && J.back() < d, "hard instance: support out of range");
    const int s = static_cast<int>(J.size());
    const auto ball = lattice::enumerate_ball(
        {.dim = s, .gamma = static_cast<double>(gamma), .constraint = lattice::BallConstraint::kAll});
    require(signs.size() == ball.size(), "hard instance: sign vector length mismatch");
    SparseFourierFunction f(d);
    for (std::size_t i = 0; i < ball.size(); ++i) {
        require(signs[i] == 1 || signs[i] == -1, "hard instance: signs must be +-1");
        MultiIndex k = MultiIndex::zero(d);
        for (int t = 0; t < s; ++t)
            k.entries[static_cast<std::size_t>(J[static_cast<std::size_t>(t)])] = ball[i][t];
        f.set(k, amplitude * signs[i]);
    }
    return f;
}

// Default amplitude N(|J|, gamma)^{-1/2} for the sign-pattern instance.
inline double hard_instance_amplitude(int support_size, int gamma) {
    const auto n = lattice::count(support_size, static_cast<double>(gamma), lattice::CountKind::kN);
    return 1.0 / std::sqrt(lattice::to_double(n));
}

// Q^j restricted to the window ||k||_2 <= m, support inside J.
inline double truncated_relevance(const SparseFourierFunction& f, int j, double m,
                                  const std::vector<int>& J) {
    require(m > 0.0, "truncated relevance: m must be positive");
    bool j_in = false;
    for (int t : J) j_in |= (t == j);
    require(j_in, "truncated relevance: j must belong to J");
    const auto bound = lattice::squared_radius_bound(m);
    double q = 0.0;
    for (const auto& [k, v] : f.coefficients) {
        if (k[j] == 0 || k.norm_sq() > bound) continue;
        bool inside = true;
        for (int t = 0; t < f.dim; ++t) {
            if (k[t] != 0 && std::find(J.begin(), J.end(), t) == J.end()) {
                inside = false;
                break;
            }
        }
        if (inside) q += v * v;
    }
    return q;
}

// Smoothness floor for the truncated relevance of any class member:
// Q^j_{m,J} >= kappa - L s / m^2.
inline double truncated_relevance_floor(double kappa, double L, int s, double m) {
    return kappa - L * static_cast<double>(s) / (m * m);
}

}  // namespace varsel
