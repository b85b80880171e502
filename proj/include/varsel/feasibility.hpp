#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>

#include "varsel/lattice.hpp"
#include "varsel/saddle.hpp"

// Evaluators for the information-theoretic impossibility conditions and the
// regime classification. These report when no estimator can succeed; the
// selector side reports when the tuned estimator provably does.

namespace varsel {

struct RegimeQuery {
    long n = 1;
    int d = 2;
    int dstar = 1;
    double kappa = 1.0;
    double L = 1.0;
    double alpha = 0.25;  // in (0, 1/2)
};

inline void validate(const RegimeQuery& q) {
    require(q.n >= 1, "regime: n must be >= 1");
    require(q.dstar >= 1 && q.dstar <= q.d, "regime: need 1 <= dstar <= d");
    require(q.kappa > 0.0 && q.L > 0.0, "regime: kappa, L must be positive");
    require(q.alpha > 0.0 && q.alpha < 0.5, "regime: alpha must lie in (0, 1/2)");
}

inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Fano reduction: with M hypotheses and average divergence avg_kl, an error
// probability floor of 1/2 - alpha holds whenever avg_kl <= alpha log M.
// Returns the floor, or nullopt when the premise fails (no conclusion).
inline std::optional<double> fano_bound(double M, double avg_kl, double alpha) {
    require(M >= 3.0, "fano: M must be >= 3");
    require(alpha > 0.0 && alpha < 1.0, "fano: alpha must lie in (0,1)");
    if (avg_kl <= alpha * std::log(M)) return 0.5 - alpha;
    return std::nullopt;
}

// Divergence of a sign-mixture observation law from the null:
// KL <= cardinality * amplitude^4 * n^2.
inline double kl_divergence_bound(double cardinality, double amplitude, double n) {
    require(cardinality >= 0.0 && n >= 0.0, "kl bound: nonnegative inputs required");
    const double a2 = amplitude * amplitude;
    return cardinality * a2 * a2 * n * n;
}

enum class ImpossibilityMode {
    kBallPrior,            // sign-pattern prior on a lattice ball; quadratic in kappa
    kPointPrior,           // one point mass per support; linear in kappa
    kRegressionPointPrior  // same inequality transported to random design
};

struct ImpossibilityVerdict {
    bool impossible = false;
    double margin = 0.0;           // lhs / rhs; >= 1 means the condition holds
    bool asymptotic_only = false;  // guarantee stated for large d* only
    double error_floor = 0.0;      // 1/2 - alpha when impossible
};

// Evaluates the stated inequality exactly (counts from the exact lattice
// counter). "Impossible" means every estimator's worst-case error is at
// least 1/2 - alpha; for the ball prior the guarantee is asymptotic in d*.
inline ImpossibilityVerdict impossibility_check(const RegimeQuery& q, ImpossibilityMode mode) {
    validate(q);
    ImpossibilityVerdict v;
    const double lg = std::log(static_cast<double>(q.d) / q.dstar);
    require(lg > 0.0, "impossibility: need d > dstar");
    switch (mode) {
        case ImpossibilityMode::kBallPrior: {
            const double vt = q.L / q.kappa;
            require(vt > 1.0, "impossibility: ball prior needs L/kappa > 1");
            require(log_binomial(q.d, q.dstar) >= std::log(3.0),
                    "impossibility: ball prior needs at least 3 supports");
            const auto gb = saddle::largest_feasible_gamma(vt);
            if (!gb)
                throw ValidationError("impossibility: no feasible radius scale (L/kappa too small)");
            const double count =
                lattice::to_double(lattice::count(q.dstar, static_cast<double>(*gb), lattice::CountKind::kN));
            const double lhs = count * q.dstar * lg / (static_cast<double>(q.n) * static_cast<double>(q.n));
            const double rhs = vt / (q.alpha * static_cast<double>(*gb)) * q.kappa * q.kappa;
            v.margin = lhs / rhs;
            v.impossible = lhs >= rhs;
            v.asymptotic_only = true;
            break;
        }
        case ImpossibilityMode::kPointPrior:
        case ImpossibilityMode::kRegressionPointPrior: {
            const double lhs = q.dstar * lg / static_cast<double>(q.n);
            const double rhs = q.kappa / q.alpha;
            v.margin = lhs / rhs;
            v.impossible = lhs >= rhs;
            v.asymptotic_only = false;
            break;
        }
    }
    if (v.impossible) v.error_floor = 0.5 - q.alpha;
    return v;
}

// Left-hand sides of the four growing-sparsity regime conditions, after
// normalizing the relevance floor to one (L -> L/kappa, n -> n kappa).
// The absolute constants on the right are unknown; callers classify against
// their own choices.
struct RegimeValues {
    double sufficient = 0.0;             // rate(L'+tau) d* + log(d*)/2 + loglog(d/d*) - 2 log n'
    double necessary = 0.0;              // same with the largest feasible radius scale
    double budget = 0.0;                 // log d* + loglog(d/d*) - log n'
    double regression_sufficient = 0.0;  // rate(L'+tau) d* + log(d*)/2 + loglog(d/d*) - log n'
};

inline RegimeValues regime_map(const RegimeQuery& q, double tau) {
    validate(q);
    require(tau > 0.0, "regime: tau must be positive");
    const double ratio = static_cast<double>(q.d) / q.dstar;
    require(std::log(ratio) > 1.0, "regime: need d/dstar > e for the double log");
    const double L_eff = q.L / q.kappa;
    const double n_eff = static_cast<double>(q.n) * q.kappa;
    require(n_eff > 0.0, "regime: effective sample size must be positive");
    require(L_eff > 1.0, "regime: need L/kappa > 1");

    const double rate_wide = saddle::solve_saddle(L_eff + tau).rate;
    const auto gb = saddle::largest_feasible_gamma(L_eff);
    if (!gb) throw ValidationError("regime: no feasible radius scale at this L/kappa");
    const double rate_tight = saddle::solve_saddle(static_cast<double>(*gb)).rate;

    const double ds = static_cast<double>(q.dstar);
    const double common = 0.5 * std::log(ds) + std::log(std::log(ratio));
    RegimeValues r;
    r.sufficient = rate_wide * ds + common - 2.0 * std::log(n_eff);
    r.necessary = rate_tight * ds + common - 2.0 * std::log(n_eff);
    r.budget = std::log(ds) + std::log(std::log(ratio)) - std::log(n_eff);
    r.regression_sufficient = rate_wide * ds + common - std::log(n_eff);
    return r;
}

// Two-sided concentration radii for weighted centered chi-square sums:
// P( sum a_i (xi_i^2 - 1) >= 2 ||a||_2 sqrt(x) + 2 ||a||_inf x ) <= e^{-x},
// P( sum a_i (xi_i^2 - 1) <= -2 ||a||_2 sqrt(x) )               <= e^{-x}.
inline std::pair<double, double> chi_square_tail_bounds(std::span<const double> weights, double x) {
    require(x >= 0.0, "tail bounds: x must be >= 0");
    double sum_sq = 0.0, max_w = 0.0;
    for (double a : weights) {
        require(a >= 0.0, "tail bounds: weights must be nonnegative");
        sum_sq += a * a;
        max_w = std::max(max_w, a);
    }
    const double l2 = std::sqrt(sum_sq);
    return {2.0 * l2 * std::sqrt(x) + 2.0 * max_w * x, 2.0 * l2 * std::sqrt(x)};
}

}  // namespace varsel
