#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <span>
#include <vector>

#include "varsel/fourier.hpp"
#include "varsel/lattice.hpp"
#include "varsel/rng.hpp"
#include "varsel/saddle.hpp"

namespace varsel {

// Design density on the unit cube: bounded below by `lower` and above by
// `upper` (the rejection-sampling envelope).
struct DesignDensity {
    std::function<double(std::span<const double>)> pdf;
    double lower = 1.0;  // g_min
    double upper = 1.0;

    static DesignDensity uniform() {
        return {.pdf = [](std::span<const double>) { return 1.0; }, .lower = 1.0, .upper = 1.0};
    }
};

// Grid check that a density is a proper design density: integrates to one
// and stays above its declared floor. Tensor quadrature, so small dims only.
inline void verify_density(const DesignDensity& g, int dim, int grid = 32) {
    require(dim >= 1 && dim <= 4, "density check: tensor quadrature needs dim <= 4");
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
    double integral = 0.0;
    double min_val = std::numeric_limits<double>::infinity();
    const double cell = std::pow(1.0 / grid, dim);
    while (true) {
        for (int t = 0; t < dim; ++t)
            x[static_cast<std::size_t>(t)] = (idx[static_cast<std::size_t>(t)] + 0.5) / grid;
        const double v = g.pdf(x);
        integral += v * cell;
        min_val = std::min(min_val, v);
        int t = 0;
        while (t < dim && ++idx[static_cast<std::size_t>(t)] == grid) idx[static_cast<std::size_t>(t++)] = 0;
        if (t == dim) break;
    }
    if (min_val < g.lower - 1e-9)
        throw ValidationError("density check: density dips below its declared floor");
    if (std::abs(integral - 1.0) > 1e-2)
        throw ValidationError("density check: density does not integrate to one");
}

// n design/response pairs, row-major design matrix.
struct RegressionSample {
    int d = 1;
    long n = 0;
    double sigma = 0.0;
    std::vector<double> x;  // n * d, row-major
    std::vector<double> y;  // n

    std::span<const double> row(long i) const {
        return {x.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                static_cast<std::size_t>(d)};
    }
};

// Y_i = f(X_i) + sigma * eps_i with X_i drawn from g (rejection sampling
// against the uniform envelope) and standard normal noise, which meets the
// sub-Gaussian moment condition with proxy constant 1. Deterministic given
// the seed.
inline RegressionSample simulate_regression(const SparseFourierFunction& f, long n, double sigma,
                                            const DesignDensity& g, std::uint64_t seed) {
    require(n >= 1, "simulate: n must be >= 1");
    require(sigma >= 0.0, "simulate: sigma must be >= 0");
    require(g.upper >= g.lower && g.upper > 0.0, "simulate: rejection needs a finite density upper bound");
    RegressionSample s;
    s.d = f.dim;
    s.n = n;
    s.sigma = sigma;
    s.x.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(f.dim));
    s.y.resize(static_cast<std::size_t>(n));
    rng::Stream stream(seed);
    std::vector<double> cand(static_cast<std::size_t>(f.dim));
    const bool is_uniform = (g.upper == 1.0 && g.lower == 1.0);
    for (long i = 0; i < n; ++i) {
        for (int rejects = 0;; ++rejects) {
            for (int t = 0; t < f.dim; ++t) cand[static_cast<std::size_t>(t)] = stream.next_unit();
            if (is_uniform || stream.next_unit() * g.upper <= g.pdf(cand)) break;
            if (rejects > 100000) throw ComputeError("simulate: rejection sampler stalled");
        }
        std::copy(cand.begin(), cand.end(),
                  s.x.begin() + static_cast<std::size_t>(i) * static_cast<std::size_t>(f.dim));
        s.y[static_cast<std::size_t>(i)] = f(cand) + sigma * stream.next_gaussian();
    }
    return s;
}

namespace detail {

// Y_i / g(X_i) for every row; the per-coefficient sums reuse these.
inline std::vector<double> density_weights(const RegressionSample& s, const DesignDensity& g) {
    std::vector<double> w(static_cast<std::size_t>(s.n));
    for (long i = 0; i < s.n; ++i) {
        const double gv = g.pdf(s.row(i));
        if (gv <= 0.0) throw ComputeError("coefficient: density vanished at a design point");
        w[static_cast<std::size_t>(i)] = s.y[static_cast<std::size_t>(i)] / gv;
    }
    return w;
}

// (1/n) sum_i phi_k(X_i) w_i, with the phase accumulated over the support
// only.
inline double coefficient_sum(const RegressionSample& s, std::span<const double> w,
                              const MultiIndex& k) {
    const auto supp = k.support();
    double acc = 0.0;
    if (k.is_zero()) {
        for (long i = 0; i < s.n; ++i) acc += w[static_cast<std::size_t>(i)];
        return acc / static_cast<double>(s.n);
    }
    const bool cosine = k.sign_canonical();
    const double* row = s.x.data();
    for (long i = 0; i < s.n; ++i, row += s.d) {
        double phase = 0.0;
        for (int j : supp) phase += static_cast<double>(k[j]) * row[j];
        phase *= 2.0 * std::numbers::pi;
        acc += (cosine ? std::cos(phase) : std::sin(phase)) * w[static_cast<std::size_t>(i)];
    }
    return std::numbers::sqrt2 * acc / static_cast<double>(s.n);
}

}  // namespace detail

// Importance-weighted empirical coefficient
//   (1/n) sum_i phi_k(X_i) / g(X_i) * Y_i,
// unbiased for theta_k when g matches the sampling density.
inline double empirical_coefficient(const RegressionSample& s, const DesignDensity& g,
                                    const MultiIndex& k) {
    require(k.dim() == s.d, "coefficient: dimension mismatch");
    return detail::coefficient_sum(s, detail::density_weights(s, g), k);
}

// Tuning for the max-coefficient selector:
//   m = sqrt(vartheta d*),
//   lambda = 4 (sigma + L2) sqrt(d* log(24 sqrt(vartheta) d / d*) / (n g_min^2)).
struct RegressionPlan {
    double m = 0.0;
    double lambda = 0.0;
};

inline RegressionPlan plan_regression(long n, int d, int dstar, double vartheta, double sigma,
                                      double L2, double g_min) {
    require(n >= 1 && d >= 1 && dstar >= 1 && dstar <= d, "plan: bad sizes");
    require(vartheta > 0.0 && sigma >= 0.0 && L2 > 0.0 && g_min > 0.0, "plan: bad parameters");
    RegressionPlan p;
    p.m = std::sqrt(vartheta * dstar);
    const double lg = std::log(24.0 * std::sqrt(vartheta) * d / dstar);
    p.lambda = 4.0 * (sigma + L2) * std::sqrt(dstar * lg / (static_cast<double>(n) * g_min * g_min));
    return p;
}

enum class RegressionStrategy { kExhaustive, kStepwise };

namespace detail {

// Windows S^j pooled over j: all indices with 1 <= ||k||_0 <= dstar and
// ||k||_2 <= m, grouped by weight, each group sorted lexicographically.
inline std::vector<std::vector<MultiIndex>> regression_windows(int d, double m, int dstar,
                                                               std::size_t size_limit = 2'000'000) {
    const auto bound = lattice::squared_radius_bound(m);
    std::vector<std::vector<MultiIndex>> by_weight;
    std::size_t total = 0;
    for (int w = 1; w <= dstar; ++w) {
        std::vector<MultiIndex> level;
        if (w <= bound) {
            lattice::for_each_subset(d, w, [&](const std::vector<int>& T) {
                std::vector<std::int32_t> cur(T.size(), 0);
                struct Rec {
                    const std::vector<int>& T;
                    int d;
                    std::vector<MultiIndex>& out;
                    std::vector<std::int32_t>& cur;
                    void operator()(std::size_t pos, std::int64_t remaining) const {
                        if (pos == T.size()) {
                            MultiIndex k = MultiIndex::zero(d);
                            for (std::size_t i = 0; i < T.size(); ++i)
                                k.entries[static_cast<std::size_t>(T[i])] = cur[i];
                            out.push_back(std::move(k));
                            return;
                        }
                        const std::int64_t r = lattice::isqrt_floor(remaining);
                        for (std::int64_t v = -r; v <= r; ++v) {
                            if (v == 0) continue;
                            cur[pos] = static_cast<std::int32_t>(v);
                            (*this)(pos + 1, remaining - v * v);
                        }
                    }
                };
                Rec{T, d, level, cur}(0, bound);
            });
            std::sort(level.begin(), level.end());
        }
        total += level.size();
        if (total > size_limit) throw ValidationError("select: enumeration guard exceeded");
        by_weight.push_back(std::move(level));
    }
    return by_weight;
}

}  // namespace detail

struct RegressionSelection {
    std::vector<int> selected;
    bool early_stopped = false;  // the stepwise scan quit at d* marks
};

// Max-coefficient selector: j is relevant when some window coefficient
// touching j satisfies |theta_hat_k| > lambda (strict). The stepwise
// strategy sweeps weights 1..d*, marks the whole support of each exceeding
// coefficient, and stops once d* variables are marked; when the early stop
// never fires it returns exactly the exhaustive scan's answer.
inline RegressionSelection select_regression_detailed(
    const RegressionSample& s, const DesignDensity& g, double m, double lambda, int dstar,
    RegressionStrategy strategy = RegressionStrategy::kStepwise) {
    require(m > 0.0 && lambda >= 0.0, "select: bad tuning");
    require(dstar >= 1 && dstar <= s.d, "select: bad dstar");
    const auto windows = detail::regression_windows(s.d, m, dstar);
    const auto weights = detail::density_weights(s, g);
    std::set<int> marked;
    for (const auto& level : windows) {
        for (const auto& k : level) {
            if (std::abs(detail::coefficient_sum(s, weights, k)) > lambda) {
                for (int j : k.support()) marked.insert(j);
                if (strategy == RegressionStrategy::kStepwise &&
                    static_cast<int>(marked.size()) >= dstar)
                    return {{marked.begin(), marked.end()}, true};
            }
        }
    }
    return {{marked.begin(), marked.end()}, false};
}

inline std::vector<int> select_regression(const RegressionSample& s, const DesignDensity& g,
                                          double m, double lambda, int dstar,
                                          RegressionStrategy strategy = RegressionStrategy::kStepwise) {
    return select_regression_detailed(s, g, m, lambda, dstar, strategy).selected;
}

// Both sample-size conditions behind the recovery guarantee, with margins
// (ratio of the passing side to the requirement; > 1 means satisfied).
struct RegressionConditionReport {
    bool sup_norm_ok = false;    // d* log(24 sqrt(vt) d/d*) / n <= L2^2 / Linf^2
    double sup_norm_margin = 0.0;
    bool relevance_ok = false;   // 128 (sigma+L2)^2 d* N(d*,vt) log(...) / (n g_min^2) < kappa
    double relevance_margin = 0.0;
    bool both = false;
};

inline RegressionConditionReport check_recovery_conditions(long n, int d, int dstar,
                                                           double vartheta, double sigma,
                                                           double L2, double Linf, double g_min,
                                                           double kappa) {
    require(n >= 1 && dstar >= 1 && dstar <= d, "conditions: bad sizes");
    require(vartheta > 0.0 && sigma >= 0.0 && L2 > 0.0 && Linf > 0.0 && g_min > 0.0 && kappa > 0.0,
            "conditions: parameters must be positive");
    const double lg = std::log(24.0 * std::sqrt(vartheta) * d / dstar);
    RegressionConditionReport r;
    const double lhs1 = dstar * lg / static_cast<double>(n);
    const double rhs1 = (L2 * L2) / (Linf * Linf);
    r.sup_norm_ok = lhs1 <= rhs1;
    r.sup_norm_margin = rhs1 / lhs1;
    const double count = lattice::to_double(lattice::count(dstar, vartheta, lattice::CountKind::kN));
    const double lhs2 = 128.0 * (sigma + L2) * (sigma + L2) * dstar * count * lg /
                        (static_cast<double>(n) * g_min * g_min);
    r.relevance_ok = lhs2 < kappa;
    r.relevance_margin = kappa / lhs2;
    r.both = r.sup_norm_ok && r.relevance_ok;
    return r;
}

}  // namespace varsel
