#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "varsel/common.hpp"

// Numerics behind the lattice-count asymptotics: the theta generating
// function h(z) = sum_{r in Z} z^{r^2}, the stationarity equation of
// l_gamma(z) = log h(z) - gamma log z, and the resulting count formulas.

namespace varsel::saddle {

inline constexpr std::int64_t kSeriesCap = 1'000'000;
inline constexpr double kDefaultTol = 1e-12;

// h(z) = 1 + 2 sum_{r>=1} z^{r^2}, relative error <= tol. Truncates once the
// geometric tail bound z^{r^2} * q/(1-q), q = z^{2r+1}, drops below tol times
// the running sum.
inline double theta(double z, double tol = kDefaultTol) {
    require(z >= 0.0 && z < 1.0, "theta: z must lie in [0,1)");
    require(tol > 0.0, "theta: tol must be positive");
    double sum = 1.0;
    for (std::int64_t r = 1; r <= kSeriesCap; ++r) {
        const double term = 2.0 * std::pow(z, static_cast<double>(r) * static_cast<double>(r));
        sum += term;
        const double q = std::pow(z, static_cast<double>(2 * r + 1));
        if (term * q <= tol * sum * (1.0 - q)) return sum;
    }
    throw ComputeError("theta: series cap reached");
}

namespace detail {

// Weighted sums S_p(y) = sum_{k in Z} k^p e^{-y k^2} for p = 0, 2, 4,
// all truncated with a common tail bound so each carries relative error
// <= tol. For s > r the term ratio is (s/r)^4 z^{s^2-r^2} <= e^{4u/r} q^u
// with u = s - r and q = e^{-y(2r+1)}; the geometric tail sum with that
// inflation factor bounds all three weights at once.
struct ThetaSums {
    double s0, s2, s4;
};

inline ThetaSums theta_sums(double y, double tol) {
    require(y > 0.0, "theta sums: y must be positive");
    require(tol > 0.0, "theta sums: tol must be positive");
    double s0 = 1.0, s2 = 0.0, s4 = 0.0;
    for (std::int64_t r = 1; r <= kSeriesCap; ++r) {
        const double rr = static_cast<double>(r) * static_cast<double>(r);
        const double w = std::exp(-y * rr);
        s0 += 2.0 * w;
        s2 += 2.0 * rr * w;
        s4 += 2.0 * rr * rr * w;
        const double g = std::exp(-y * static_cast<double>(2 * r + 1) + 4.0 / static_cast<double>(r));
        if (g < 1.0) {
            const double tail = 2.0 * rr * rr * w * g / (1.0 - g);
            if (tail <= tol * s4 && tail <= tol * s2 * rr && tail <= tol * s0 * rr * rr) return {s0, s2, s4};
        }
        if (w == 0.0) return {s0, s2, s4};
    }
    throw ComputeError("theta sums: series cap reached");
}

}  // namespace detail

// Mean of k^2 under the weights e^{-y k^2}; equals z h'(z)/h(z) at z = e^{-y}.
// Strictly decreasing bijection of (0, inf) onto (0, inf).
inline double theta_mean_square(double y, double tol = kDefaultTol) {
    const auto s = detail::theta_sums(y, tol);
    return s.s2 / s.s0;
}

// d/dy of theta_mean_square, by the term-wise series derivative:
// (S2^2 - S4 S0) / S0^2 < 0.
inline double theta_mean_square_deriv(double y, double tol = kDefaultTol) {
    const auto s = detail::theta_sums(y, tol);
    return (s.s2 * s.s2 - s.s4 * s.s0) / (s.s0 * s.s0);
}

// Full stationary-point solution for one gamma.
struct SaddleData {
    double gamma = 0.0;
    double y = 0.0;              // root of theta_mean_square(y) = gamma
    double z = 0.0;              // e^{-y}, in (0,1)
    double rate = 0.0;           // l_gamma(z) = log h(z) + gamma y: growth rate per dimension
    double curvature = 0.0;      // l''_gamma(z) > 0
    double log_prefactor = 0.0;  // c_gamma of the count expansion
    double residual = 0.0;       // |theta_mean_square(y) - gamma| at the returned root
};

// Bracketing bisection (expandable bracket) refined by Newton. The root
// always exists and is unique, so hitting the iteration cap signals a
// tolerance or bracket bug rather than a math failure.
inline SaddleData solve_saddle(double gamma, double tol = 1e-12) {
    require(gamma > 0.0, "solve_saddle: gamma must be positive");
    require(tol > 0.0, "solve_saddle: tol must be positive");
    const double series_tol = std::min(tol, 1e-13);

    double lo = 1e-8, hi = 50.0;
    int expand = 0;
    while (theta_mean_square(lo, series_tol) <= gamma) {
        lo *= 0.5;
        if (++expand > 600) throw ComputeError("solve_saddle: bracket expansion failed (low)");
    }
    expand = 0;
    while (theta_mean_square(hi, series_tol) >= gamma) {
        hi *= 2.0;
        if (++expand > 60) throw ComputeError("solve_saddle: bracket expansion failed (high)");
    }

    double y = 0.5 * (lo + hi);
    double resid = theta_mean_square(y, series_tol) - gamma;
    int it = 0;
    while (std::abs(resid) > tol) {
        if (++it > 400) throw ComputeError("solve_saddle: no convergence (tolerance/bracket bug)");
        // The mean-square map decreases in y, so a positive residual puts the
        // root above y. Newton step when it stays inside the bracket,
        // bisection otherwise.
        (resid > 0.0 ? lo : hi) = y;
        const double newton = y - resid / theta_mean_square_deriv(y, series_tol);
        y = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
        resid = theta_mean_square(y, series_tol) - gamma;
    }

    SaddleData out;
    out.gamma = gamma;
    out.y = y;
    out.z = std::exp(-y);
    const auto s = detail::theta_sums(y, series_tol);
    const double h = s.s0;
    out.rate = std::log(h) + gamma * y;
    const double phi_deriv = (s.s2 * s.s2 - s.s4 * s.s0) / (s.s0 * s.s0);
    out.curvature = -phi_deriv * std::exp(2.0 * y);
    out.log_prefactor = std::log((h - 1.0) / (h * out.z * (1.0 - out.z) *
                                              std::sqrt(2.0 * std::numbers::pi * out.curvature)));
    out.residual = std::abs(s.s2 / s.s0 - gamma);
    return out;
}

// log of the large-dimension equivalent of the ball counts:
//   N_i ~ (h(z)/z^gamma)^dim / (h(z)^{i-1} z(1-z) sqrt(2 l'' pi dim)).
inline double log_asymptotic_count(int which, int dim, double gamma, double tol = 1e-12) {
    require(which == 1 || which == 2, "asymptotic count: which must be 1 or 2");
    require(dim >= 1, "asymptotic count: dim must be >= 1");
    const SaddleData s = solve_saddle(gamma, tol);
    const double h = std::exp(s.rate - gamma * s.y);
    return static_cast<double>(dim) * s.rate - static_cast<double>(which - 1) * std::log(h) -
           std::log(s.z * (1.0 - s.z)) -
           0.5 * std::log(2.0 * s.curvature * std::numbers::pi * static_cast<double>(dim));
}

inline double asymptotic_count(int which, int dim, double gamma, double tol = 1e-12) {
    return std::exp(log_asymptotic_count(which, dim, gamma, tol));
}

// log(N1 - N2) equivalent: dim * rate - log(dim)/2 + log_prefactor. Works on
// the log scale, so no overflow for large dim. Exposed for any positive
// gamma; the leading-order log equivalence holds for non-integer scales too.
inline double log_count_asymptotic(int dim, double gamma, double tol = 1e-12) {
    require(dim >= 1, "asymptotic count: dim must be >= 1");
    const SaddleData s = solve_saddle(gamma, tol);
    return static_cast<double>(dim) * s.rate - 0.5 * std::log(static_cast<double>(dim)) +
           s.log_prefactor;
}

// Largest integer g >= 1 with g * (1 + (h(z_g) - 1)^{-1}) <= vartheta, or
// nullopt when even g = 1 fails. Since the multiplier exceeds 1, only
// g <= vartheta can qualify; the scan stays exact.
inline std::optional<int> largest_feasible_gamma(double vartheta, double tol = 1e-12) {
    require(vartheta > 1.0, "largest_feasible_gamma: vartheta must exceed 1");
    std::optional<int> best;
    for (int g = 1; static_cast<double>(g) <= vartheta; ++g) {
        const SaddleData s = solve_saddle(static_cast<double>(g), tol);
        const double h = std::exp(s.rate - s.gamma * s.y);
        if (static_cast<double>(g) * (1.0 + 1.0 / (h - 1.0)) <= vartheta) best = g;
    }
    return best;
}

}  // namespace varsel::saddle
