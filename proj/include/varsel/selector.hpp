#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "varsel/lattice.hpp"
#include "varsel/white_noise.hpp"

namespace varsel {

// Window radii m_l = sqrt(l * vartheta) and thresholds
//   lambda_l = (2 sqrt(A N(l, vartheta) d* log(2ed/d*)) + 2 A d* log(2ed/d*)) / n
// for l = 1..d*, the single-knob parameterization with
// vartheta = L(1+tau)/kappa.
struct ThresholdPlan {
    long n = 1;
    int d = 1;
    int dstar = 1;
    double A = 2.0;
    double vartheta = 1.0;
    std::vector<double> m;       // m[l-1]
    std::vector<double> lambda;  // lambda[l-1]
};

inline ThresholdPlan plan_thresholds(long n, int d, int dstar, double A, double vartheta) {
    require(n >= 1, "plan: n must be >= 1");
    require(dstar >= 1 && dstar <= d, "plan: need 1 <= dstar <= d");
    require(A > 1.0, "plan: A must exceed 1");
    require(vartheta > 0.0, "plan: vartheta must be positive");
    ThresholdPlan p{n, d, dstar, A, vartheta, {}, {}};
    const double lg = 1.0 + std::log(2.0 * static_cast<double>(d) / dstar);  // log(2ed/d*)
    for (int l = 1; l <= dstar; ++l) {
        const double count = lattice::to_double(lattice::count(l, vartheta, lattice::CountKind::kN));
        p.m.push_back(std::sqrt(l * vartheta));
        p.lambda.push_back((2.0 * std::sqrt(A * count * dstar * lg) + 2.0 * A * dstar * lg) /
                           static_cast<double>(n));
    }
    return p;
}

// Centered block statistic: sum over the window S^j_{m,I} of (y_k^2 - 1/n),
// an unbiased estimate of the truncated relevance on that window.
inline double q_hat(const WhiteNoiseSample& sample, int j, double m, const std::vector<int>& I) {
    double q = 0.0;
    const double c = 1.0 / static_cast<double>(sample.n);
    for (const auto& k : lattice::enumerate_support_subset(sample.d, j, m, I)) {
        const double y = sample.at(k);
        q += y * y - c;
    }
    return q;
}

enum class SelectVariant { kFull, kSimple };

// Enumeration guards for the exact subset maximization; the search is
// exponential in the worst case, so desk-scale limits are enforced.
struct SelectorGuard {
    int max_dim = 25;
    int max_level = 4;
};

struct SelectionWitness {
    int level = 0;            // window size l attaining the max
    std::vector<int> subset;  // the maximizing I
};

struct SelectionResult {
    std::vector<int> selected;                 // { j : statistic_j >= 1 }
    std::vector<double> statistic;             // per variable, threshold-normalized
    std::map<int, SelectionWitness> witness;   // for each selected variable
};

namespace detail {

// Block sums keyed by exact support set, with per-level cutoffs applied via
// prefix sums over the squared norm.
struct BlockTable {
    // support -> sorted (norm_sq, prefix sum of y^2, count)
    struct Entry {
        std::vector<std::int64_t> norms;
        std::vector<double> prefix_sq;
    };
    std::map<std::vector<int>, Entry> blocks;
    long n = 1;

    static BlockTable build(const WhiteNoiseSample& sample, int dstar) {
        BlockTable t;
        t.n = sample.n;
        std::map<std::vector<int>, std::vector<std::pair<std::int64_t, double>>> raw;
        for (const auto& [k, y] : sample.observations) {
            const int w = k.weight();
            if (w < 1 || w > dstar) continue;
            raw[k.support()].emplace_back(k.norm_sq(), y * y);
        }
        for (auto& [T, v] : raw) {
            std::sort(v.begin(), v.end());
            Entry e;
            double acc = 0.0;
            for (auto& [nsq, ysq] : v) {
                acc += ysq;
                e.norms.push_back(nsq);
                e.prefix_sq.push_back(acc);
            }
            t.blocks.emplace(T, std::move(e));
        }
        return t;
    }

    // sum over {k : support(k) = T, ||k||^2 <= bound} of (y_k^2 - 1/n),
    // together with the number of indices covered.
    std::pair<double, std::size_t> block_sum(const std::vector<int>& T, std::int64_t bound) const {
        auto it = blocks.find(T);
        if (it == blocks.end()) return {0.0, 0};
        const auto& e = it->second;
        const auto pos = std::upper_bound(e.norms.begin(), e.norms.end(), bound) - e.norms.begin();
        if (pos == 0) return {0.0, 0};
        const auto cnt = static_cast<std::size_t>(pos);
        return {e.prefix_sq[cnt - 1] - static_cast<double>(cnt) / static_cast<double>(n), cnt};
    }
};

// Exact number of indices with support exactly T (|T| = w) and squared norm
// <= bound, by inclusion-exclusion over coordinates forced to zero. Used to
// detect mis-built observation sets.
inline double exact_block_cardinality(int w, std::int64_t bound) {
    double total = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= w; ++i) {
        const double c = lattice::to_double(lattice::count_ball(w - i, bound));
        total += ((i % 2) ? -1.0 : 1.0) * binom * c;
        binom = binom * (w - i) / (i + 1);
    }
    return total;
}

}  // namespace detail

// Threshold selector. The full variant scans every window size l <= d* and
// every subset I of that size; the simple variant uses only l = d*.
// Selection keeps >= at the threshold boundary.
inline SelectionResult select(const WhiteNoiseSample& sample, const ThresholdPlan& plan,
                              SelectVariant variant = SelectVariant::kFull,
                              const SelectorGuard& guard = {}) {
    require(plan.d <= guard.max_dim, "select: dimension guard exceeded");
    require(plan.dstar <= guard.max_level, "select: window-size guard exceeded");
    require(sample.d == plan.d, "select: sample/plan dimension mismatch");

    const auto table = detail::BlockTable::build(sample, plan.dstar);
    // Window bounds come from floor(l * vartheta) directly, exactly matching
    // the integer bound behind the plan's count N(l, vartheta); squaring the
    // stored radii would risk one-ulp misclassification at the shell edge.
    // Coverage first: every support of size w <= d* must hold its full
    // complement of indices at the widest cutoff (smaller cutoffs are
    // prefixes of it).
    {
        const auto bound = lattice::floored_squared_bound(plan.vartheta, plan.dstar);
        for (int w = 1; w <= plan.dstar; ++w) {
            if (w > bound) break;  // no index of that weight fits the ball
            const double expected = detail::exact_block_cardinality(w, bound);
            lattice::for_each_subset(plan.d, w, [&](const std::vector<int>& T) {
                const auto [sum, cnt] = table.block_sum(T, bound);
                (void)sum;
                if (static_cast<double>(cnt) + 0.5 < expected)
                    throw ComputeError("select: observation set does not cover the statistic windows");
            });
        }
    }

    SelectionResult res;
    res.statistic.assign(static_cast<std::size_t>(plan.d), 0.0);
    const int l_lo = (variant == SelectVariant::kSimple) ? plan.dstar : 1;

    for (int j = 0; j < plan.d; ++j) {
        double best = 0.0;  // subsets without j contribute an empty sum
        SelectionWitness wit;
        bool found = false;
        for (int l = l_lo; l <= plan.dstar; ++l) {
            const double lam = plan.lambda[static_cast<std::size_t>(l - 1)];
            const auto bound = lattice::floored_squared_bound(plan.vartheta, l);
            // maximize over I of size l containing j
            std::vector<int> others;
            lattice::for_each_subset(plan.d - 1, l - 1, [&](const std::vector<int>& pick) {
                std::vector<int> I{j};
                for (int p : pick) I.push_back(p >= j ? p + 1 : p);
                std::sort(I.begin(), I.end());
                // sum of blocks over supports T with j in T, T subset of I
                double q = 0.0;
                const auto rest_sz = static_cast<int>(I.size()) - 1;
                std::vector<int> rest;
                for (int v : I)
                    if (v != j) rest.push_back(v);
                for (std::uint32_t mask = 0; mask < (1u << rest_sz); ++mask) {
                    std::vector<int> T{j};
                    for (int b = 0; b < rest_sz; ++b)
                        if (mask & (1u << b)) T.push_back(rest[static_cast<std::size_t>(b)]);
                    std::sort(T.begin(), T.end());
                    q += table.block_sum(T, bound).first;
                }
                const double stat = q / lam;
                if (!found || stat > best) {
                    best = stat;
                    wit = {l, I};
                    found = true;
                }
            });
        }
        res.statistic[static_cast<std::size_t>(j)] = std::max(best, 0.0);
        if (best >= 1.0) {
            res.selected.push_back(j);
            res.witness.emplace(j, std::move(wit));
        }
    }
    return res;
}

// Union of full-variant selections across a vartheta grid, all at A = 2.
inline SelectionResult select_adaptive(const WhiteNoiseSample& sample,
                                       std::span<const double> vartheta_grid, long n, int d,
                                       int dstar, const SelectorGuard& guard = {}) {
    require(!vartheta_grid.empty(), "select_adaptive: empty grid");
    SelectionResult out;
    out.statistic.assign(static_cast<std::size_t>(d), 0.0);
    for (double vt : vartheta_grid) {
        require(vt > 1.0, "select_adaptive: grid values must exceed 1");
        const auto plan = plan_thresholds(n, d, dstar, 2.0, vt);
        auto one = select(sample, plan, SelectVariant::kFull, guard);
        for (int j = 0; j < d; ++j) {
            if (one.statistic[static_cast<std::size_t>(j)] > out.statistic[static_cast<std::size_t>(j)]) {
                out.statistic[static_cast<std::size_t>(j)] = one.statistic[static_cast<std::size_t>(j)];
                if (auto it = one.witness.find(j); it != one.witness.end())
                    out.witness.insert_or_assign(j, it->second);
            }
        }
    }
    for (int j = 0; j < d; ++j)
        if (out.statistic[static_cast<std::size_t>(j)] >= 1.0) out.selected.push_back(j);
    for (auto it = out.witness.begin(); it != out.witness.end();) {
        if (!std::binary_search(out.selected.begin(), out.selected.end(), it->first))
            it = out.witness.erase(it);
        else
            ++it;
    }
    return out;
}

// Consistency margin for the tuned selector: holds when
// 4 lambda_s <= kappa tau / (1 + tau). The plan is expected to be built at
// vartheta = L(1+tau)/kappa; the inequality is evaluated as given.
struct ConsistencyReport {
    bool holds = false;
    double slack = 0.0;   // kappa tau/(1+tau) - 4 lambda_s
    double margin = 0.0;  // ratio of the two sides; >= 1 iff holds
};

inline ConsistencyReport consistency_check(double kappa, double /*L*/, double tau,
                                           const ThresholdPlan& plan, int s) {
    require(s >= 1 && s <= plan.dstar, "consistency: need 1 <= s <= dstar");
    require(tau > 0.0, "consistency: tau must be positive");
    const double lhs = 4.0 * plan.lambda[static_cast<std::size_t>(s - 1)];
    const double rhs = kappa * tau / (1.0 + tau);
    return {lhs <= rhs, rhs - lhs, rhs / lhs};
}

// Sharper type-II threshold at confidence alpha: the truncated relevance
// must exceed
//   ( sqrt(lambda_s + (2 sqrt(N log(2s/a)) + 1)/n) + sqrt(2 log(2s/a)/n) )^2.
inline double sharp_relevance_threshold(const ThresholdPlan& plan, int s, double alpha) {
    require(s >= 1 && s <= plan.dstar, "sharp threshold: need 1 <= s <= dstar");
    require(alpha > 0.0 && alpha < 1.0, "sharp threshold: alpha must lie in (0,1)");
    const double count = lattice::to_double(lattice::count(s, plan.vartheta, lattice::CountKind::kN));
    const double lg = std::log(2.0 * s / alpha);
    const double n = static_cast<double>(plan.n);
    const double inner = plan.lambda[static_cast<std::size_t>(s - 1)] +
                         (2.0 * std::sqrt(count * lg) + 1.0) / n;
    const double a = std::sqrt(inner);
    const double b = std::sqrt(2.0 * lg / n);
    return (a + b) * (a + b);
}

inline ConsistencyReport consistency_check_sharp(double kappa, double /*L*/, double tau,
                                                 const ThresholdPlan& plan, int s, double alpha) {
    const double rhs = sharp_relevance_threshold(plan, s, alpha);
    const double lhs = kappa * tau / (1.0 + tau);  // smoothness floor of the truncated relevance
    return {lhs >= rhs, lhs - rhs, lhs / rhs};
}

// Smallest detectable relevance order:
//   (log(d/s)/n^2)^{2/(4+s)}  v  s log(d/s)/n.
// Absolute constants are unknown; positions experiments relative to the
// frontier only.
inline double separation_rate(long n, int d, int s) {
    require(s >= 1 && s < d, "separation rate: need 1 <= s < d");
    require(n >= 1, "separation rate: n must be >= 1");
    const double lg = std::log(static_cast<double>(d) / s);
    const double nn = static_cast<double>(n);
    const double first = std::pow(lg / (nn * nn), 2.0 / (4.0 + s));
    const double second = s * lg / nn;
    return std::max(first, second);
}

}  // namespace varsel
