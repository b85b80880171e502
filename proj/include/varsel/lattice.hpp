#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "varsel/multi_index.hpp"

namespace varsel::lattice {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kDefaultEnumDimLimit = 16;
inline constexpr std::int64_t kMaxSquaredBound = 1'000'000;

enum class BallConstraint { kAll, kFirstCoordNonzero };

// N1 counts every point of the ball, N2 those with first coordinate zero,
// N = N1 - N2 the remainder.
enum class CountKind { kN1, kN2, kN };

// Constraint is ||k||_2^2 <= gamma * dim; gamma is the squared-radius scale.
struct BallCountQuery {
    int dim = 1;
    double gamma = 1.0;
    BallConstraint constraint = BallConstraint::kAll;
};

// The integer bound actually enforced: floor(gamma * dim). All membership
// tests compare exact integer squared norms against it, so no point near the
// boundary can be misclassified by floating-point noise.
inline std::int64_t floored_squared_bound(double gamma, int dim) {
    require(dim >= 1, "lattice: dim must be >= 1");
    require(gamma > 0.0, "lattice: gamma must be positive");
    double b = std::floor(gamma * static_cast<double>(dim));
    require(b <= static_cast<double>(kMaxSquaredBound), "lattice: squared bound too large");
    return static_cast<std::int64_t>(b);
}

inline std::int64_t isqrt_floor(std::int64_t v) {
    if (v < 0) return -1;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

// Integer bound for a real radius: floor(radius^2), snapping squares that sit
// within a few ulps of an integer. Squaring a radius like sqrt(6) must yield
// the window bound 6, not 5.
inline std::int64_t squared_radius_bound(double radius) {
    const double sq = radius * radius;
    const double nearest = std::round(sq);
    if (std::abs(sq - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, sq))
        return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::floor(sq));
}

// #{k in Z^dim : ||k||_2^2 <= sq_bound}, exact. Dimension-by-dimension
// convolution of the one-dimensional square counts in arbitrary precision,
// so it stays exact far beyond enumeration scale.
inline BigInt count_ball(int dim, std::int64_t sq_bound) {
    require(dim >= 0, "lattice: dim must be >= 0");
    if (sq_bound < 0) return 0;
    require(sq_bound <= kMaxSquaredBound, "lattice: squared bound too large");
    const auto bound = static_cast<std::size_t>(sq_bound);
    std::vector<BigInt> ways(bound + 1);
    ways[0] = 1;
    for (int t = 0; t < dim; ++t) {
        std::vector<BigInt> next(bound + 1);
        for (std::size_t s = 0; s <= bound; ++s) {
            if (ways[s] == 0) continue;
            next[s] += ways[s];
            for (std::int64_t r = 1; s + static_cast<std::size_t>(r * r) <= bound; ++r)
                next[s + static_cast<std::size_t>(r * r)] += 2 * ways[s];
        }
        ways.swap(next);
    }
    BigInt total = 0;
    for (const auto& w : ways) total += w;
    return total;
}

inline BigInt count(int dim, double gamma, CountKind which) {
    const std::int64_t bound = floored_squared_bound(gamma, dim);
    switch (which) {
        case CountKind::kN1: return count_ball(dim, bound);
        case CountKind::kN2: return count_ball(dim - 1, bound);
        case CountKind::kN: return count_ball(dim, bound) - count_ball(dim - 1, bound);
    }
    throw ValidationError("lattice: bad count kind");
}

inline BigInt count(const BallCountQuery& q, CountKind which) { return count(q.dim, q.gamma, which); }

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

// log of an exact big-integer count, safe against double overflow.
inline double log_count(const BigInt& v) {
    require(v > 0, "lattice: log of non-positive count");
    const auto bits = boost::multiprecision::msb(v);
    if (bits < 900) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 52;
    const double mant = (v >> shift).convert_to<double>();
    return std::log(mant) + static_cast<double>(shift) * std::numbers::ln2;
}

namespace detail {

inline void enumerate_rec(int pos, int dim, std::int64_t remaining, bool first_nonzero,
                          std::vector<std::int32_t>& cur, std::vector<MultiIndex>& out) {
    if (pos == dim) {
        out.emplace_back(cur);
        return;
    }
    const std::int64_t r = isqrt_floor(remaining);
    for (std::int64_t v = -r; v <= r; ++v) {
        if (first_nonzero && pos == 0 && v == 0) continue;
        cur[static_cast<std::size_t>(pos)] = static_cast<std::int32_t>(v);
        enumerate_rec(pos + 1, dim, remaining - v * v, first_nonzero, cur, out);
    }
}

}  // namespace detail

// Every k in Z^dim with ||k||_2^2 <= floor(gamma*dim) meeting the constraint,
// in lexicographic order (deterministic, byte-stable fixtures).
inline std::vector<MultiIndex> enumerate_ball(const BallCountQuery& q,
                                              int dim_limit = kDefaultEnumDimLimit) {
    require(q.dim <= dim_limit, "lattice: enumeration dimension limit exceeded");
    const std::int64_t bound = floored_squared_bound(q.gamma, q.dim);
    std::vector<MultiIndex> out;
    std::vector<std::int32_t> cur(static_cast<std::size_t>(q.dim), 0);
    detail::enumerate_rec(0, q.dim, bound, q.constraint == BallConstraint::kFirstCoordNonzero,
                          cur, out);
    return out;
}

// S on a fixed support window: indices k in Z^d with ||k||_2^2 <= sq_bound,
// support(k) a subset of I and j in support(k). Embedded into dimension d;
// lexicographic order.
inline std::vector<MultiIndex> enumerate_support_subset_sq(int d, int j, std::int64_t sq_bound,
                                                           std::vector<int> I,
                                                           int dim_limit = kDefaultEnumDimLimit) {
    require(sq_bound >= 0, "lattice: squared bound must be nonnegative");
    require(j >= 0 && j < d, "lattice: coordinate out of range");
    std::sort(I.begin(), I.end());
    I.erase(std::unique(I.begin(), I.end()), I.end());
    require(std::binary_search(I.begin(), I.end(), j), "lattice: j must belong to I");
    require(I.empty() || (I.front() >= 0 && I.back() < d), "lattice: subset out of range");
    const int t = static_cast<int>(I.size());
    require(t <= dim_limit, "lattice: enumeration dimension limit exceeded");

    const std::int64_t bound = sq_bound;
    require(bound <= kMaxSquaredBound, "lattice: squared bound too large");
    std::vector<MultiIndex> out;
    std::vector<std::int32_t> cur(static_cast<std::size_t>(t), 0);
    const int jpos = static_cast<int>(std::lower_bound(I.begin(), I.end(), j) - I.begin());

    // Enumerate over the |I| active coordinates, then embed.
    struct Rec {
        int t, jpos;
        const std::vector<int>& I;
        int d;
        std::vector<MultiIndex>& out;
        std::vector<std::int32_t>& cur;
        void operator()(int pos, std::int64_t remaining) const {
            if (pos == t) {
                MultiIndex k = MultiIndex::zero(d);
                for (int i = 0; i < t; ++i)
                    k.entries[static_cast<std::size_t>(I[static_cast<std::size_t>(i)])] =
                        cur[static_cast<std::size_t>(i)];
                out.push_back(std::move(k));
                return;
            }
            const std::int64_t r = isqrt_floor(remaining);
            for (std::int64_t v = -r; v <= r; ++v) {
                if (pos == jpos && v == 0) continue;
                cur[static_cast<std::size_t>(pos)] = static_cast<std::int32_t>(v);
                (*this)(pos + 1, remaining - v * v);
            }
        }
    };
    Rec{t, jpos, I, d, out, cur}(0, bound);
    return out;
}

inline std::vector<MultiIndex> enumerate_support_subset(int d, int j, double radius,
                                                        std::vector<int> I,
                                                        int dim_limit = kDefaultEnumDimLimit) {
    require(radius > 0.0, "lattice: radius must be positive");
    return enumerate_support_subset_sq(d, j, squared_radius_bound(radius), std::move(I), dim_limit);
}

namespace detail {

inline void combinations_rec(int d, int size, int start, std::vector<int>& cur,
                             const std::function<void(const std::vector<int>&)>& fn) {
    if (static_cast<int>(cur.size()) == size) {
        fn(cur);
        return;
    }
    for (int v = start; v <= d - (size - static_cast<int>(cur.size())); ++v) {
        cur.push_back(v);
        combinations_rec(d, size, v + 1, cur, fn);
        cur.pop_back();
    }
}

}  // namespace detail

inline void for_each_subset(int d, int size, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> cur;
    detail::combinations_rec(d, size, 0, cur, fn);
}

// S with a weight budget: indices k in Z^d with ||k||_2 <= radius,
// ||k||_0 <= max_weight and k_j != 0. Sorted lexicographically.
inline std::vector<MultiIndex> enumerate_support_bounded(int d, int j, double radius,
                                                         int max_weight,
                                                         std::size_t size_limit = 5'000'000) {
    require(radius > 0.0, "lattice: radius must be positive");
    require(j >= 0 && j < d, "lattice: coordinate out of range");
    require(max_weight >= 1 && max_weight <= d, "lattice: weight budget out of range");
    const auto bound = squared_radius_bound(radius);
    std::vector<MultiIndex> out;
    for (int w = 1; w <= max_weight; ++w) {
        if (w > bound) break;  // each nonzero entry costs at least 1
        std::vector<int> rest;
        detail::combinations_rec(d, w, 0, rest, [&](const std::vector<int>& T) {
            if (!std::binary_search(T.begin(), T.end(), j)) return;
            // all-nonzero vectors on support T
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
                    const std::int64_t r = isqrt_floor(remaining);
                    for (std::int64_t v = -r; v <= r; ++v) {
                        if (v == 0) continue;
                        cur[pos] = static_cast<std::int32_t>(v);
                        (*this)(pos + 1, remaining - v * v);
                    }
                }
            };
            Rec{T, d, out, cur}(0, bound);
            if (out.size() > size_limit) throw ValidationError("lattice: enumeration size limit exceeded");
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Closed-form bounds on N1(dim, gamma).
struct AnalyticBounds {
    double volumetric_lower = 0.0;   // V(d)(sqrt(g)-1)^d d^{d/2}, clamped at 0
    double volumetric_upper = 0.0;   // V(d)(sqrt(g)+1)^d d^{d/2}
    double exponential_upper = 0.0;  // 0.3 (9 pi e g)^{d/2}, needs g >= 1
};

inline double unit_ball_volume(int dim) {
    return std::exp(0.5 * dim * std::log(std::numbers::pi) - std::lgamma(1.0 + 0.5 * dim));
}

inline std::pair<double, double> volumetric_bounds(int dim, double gamma) {
    require(dim >= 1, "lattice: dim must be >= 1");
    require(gamma > 0.0, "lattice: gamma must be positive");
    const double v = unit_ball_volume(dim);
    const double root = std::sqrt(gamma);
    const double scale = std::pow(static_cast<double>(dim), 0.5 * dim);
    const double lo = root > 1.0 ? v * std::pow(root - 1.0, dim) * scale : 0.0;
    const double hi = v * std::pow(root + 1.0, dim) * scale;
    return {lo, hi};
}

inline double exponential_count_bound(int dim, double gamma) {
    require(dim >= 1, "lattice: dim must be >= 1");
    require(gamma >= 1.0, "lattice: exponential bound needs gamma >= 1");
    return 0.3 * std::pow(9.0 * std::numbers::pi * std::numbers::e * gamma, 0.5 * dim);
}

inline AnalyticBounds analytic_bounds(int dim, double gamma) {
    auto [lo, hi] = volumetric_bounds(dim, gamma);
    return {lo, hi, exponential_count_bound(dim, gamma)};
}

}  // namespace varsel::lattice
