#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "varsel/selector.hpp"

using namespace varsel;

namespace {

// Definition-level reimplementation used to validate the block-decomposition
// fast path: direct window sums via q_hat, nothing shared with select().
std::vector<int> brute_select(const WhiteNoiseSample& s, const ThresholdPlan& p, bool simple) {
    std::vector<int> out;
    for (int j = 0; j < p.d; ++j) {
        double stat = 0.0;
        for (int l = simple ? p.dstar : 1; l <= p.dstar; ++l) {
            std::vector<int> others;
            lattice::for_each_subset(p.d - 1, l - 1, [&](const std::vector<int>& pick) {
                std::vector<int> I{j};
                for (int v : pick) I.push_back(v >= j ? v + 1 : v);
                const double q = q_hat(s, j, p.m[static_cast<std::size_t>(l - 1)], I);
                stat = std::max(stat, q / p.lambda[static_cast<std::size_t>(l - 1)]);
            });
        }
        if (stat >= 1.0) out.push_back(j);
    }
    return out;
}

WhiteNoiseSample zero_sample(int d, long n, double max_radius, int dstar) {
    WhiteNoiseSample s;
    s.d = d;
    s.n = n;
    for (const auto& k : observation_index_set(d, max_radius, dstar)) s.observations[k] = 0.0;
    return s;
}

}  // namespace

TEST(Plan, MatchesDirectArithmetic) {
    // n=1000, d=100, d*=2, A=2, vartheta=4: N(1,4) = 4 and
    // lambda_1 = (2 sqrt(2*4*2*log(100e)) + 4*2*log(100e)) / 1000
    const auto p = plan_thresholds(1000, 100, 2, 2.0, 4.0);
    const double lg = std::log(100.0) + 1.0;
    const double expect1 = (2.0 * std::sqrt(2.0 * 4.0 * 2.0 * lg) + 2.0 * 2.0 * 2.0 * lg) / 1000.0;
    EXPECT_NEAR(p.lambda[0], expect1, 1e-15);
    EXPECT_NEAR(p.lambda[0], 0.063782, 1e-6);
    EXPECT_NEAR(p.m[0], 2.0, 1e-15);
    EXPECT_NEAR(p.m[1], std::sqrt(8.0), 1e-15);

    // homogeneous in 1/n
    const auto p10 = plan_thresholds(10000, 100, 2, 2.0, 4.0);
    for (int l = 0; l < 2; ++l)
        EXPECT_NEAR(p10.lambda[static_cast<std::size_t>(l)],
                    p.lambda[static_cast<std::size_t>(l)] / 10.0, 1e-15);
}

TEST(Plan, LambdaNondecreasingInLevel) {
    for (double vt : {1.5, 2.0, 4.0}) {
        const auto p = plan_thresholds(500, 20, 4, 2.0, vt);
        for (std::size_t l = 1; l < p.lambda.size(); ++l) {
            EXPECT_GE(p.lambda[l], p.lambda[l - 1]);
            EXPECT_GT(p.m[l], p.m[l - 1]);
        }
    }
    EXPECT_THROW(plan_thresholds(100, 5, 6, 2.0, 2.0), ValidationError);
    EXPECT_THROW(plan_thresholds(100, 5, 2, 1.0, 2.0), ValidationError);
}

TEST(QHat, HandValues) {
    const int d = 5;
    auto s = zero_sample(d, 100, 2.0, 2);
    // all-zero observations: -|S|/n
    const auto S = lattice::enumerate_support_subset(d, 0, 2.0, {0, 1});
    EXPECT_NEAR(q_hat(s, 0, 2.0, {0, 1}), -static_cast<double>(S.size()) / 100.0, 1e-12);
    // single loaded coefficient, m = 1, I = {j}: window is {+-e_j}
    s.observations[MultiIndex::unit(d, 0)] = 0.6;
    EXPECT_NEAR(q_hat(s, 0, 1.0, {0}), 0.36 - 2.0 / 100.0, 1e-12);
    // missing observation signals a mis-built set
    WhiteNoiseSample tiny;
    tiny.d = d;
    tiny.n = 100;
    tiny.observations[MultiIndex::unit(d, 0)] = 0.1;
    EXPECT_THROW(q_hat(tiny, 0, 1.0, {0}), ComputeError);
}

TEST(QHat, UnbiasedUnderNoise) {
    const int d = 4;
    SparseFourierFunction f(d);
    f.set(MultiIndex({1, 1, 0, 0}), 0.4);
    f.set(MultiIndex::unit(d, 0), -0.3);
    const std::vector<int> I{0, 1};
    const double m = 2.0;
    const double truth = truncated_relevance(f, 0, m, I);
    const auto obs = observation_index_set(d, m, 2);
    const long n = 50;
    const int reps = 10000;
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double q =
            q_hat(sample_white_noise(f, n, obs, static_cast<std::uint64_t>(r)), 0, m, I);
        acc += q;
        acc2 += q * q;
    }
    const double mean = acc / reps;
    const double se = std::sqrt((acc2 / reps - mean * mean) / reps);
    EXPECT_NEAR(mean, truth, 3.0 * se);
}

TEST(Select, ZeroSampleSelectsNothing) {
    const auto p = plan_thresholds(100, 8, 2, 2.0, 2.0);
    const auto s = zero_sample(8, 100, p.m.back(), 2);
    EXPECT_TRUE(select(s, p, SelectVariant::kFull).selected.empty());
    EXPECT_TRUE(select(s, p, SelectVariant::kSimple).selected.empty());
}

TEST(Select, HandBuiltSignal) {
    const int d = 8;
    const long n = 100;
    const auto p = plan_thresholds(n, d, 2, 2.0, 2.0);
    auto s = zero_sample(d, n, p.m.back(), 2);
    s.observations[MultiIndex::unit(d, 0)] =
        std::sqrt(2.0 * p.lambda[0] + 2.0 / static_cast<double>(n));
    const auto r = select(s, p, SelectVariant::kFull);
    ASSERT_EQ(r.selected, std::vector<int>{0});
    ASSERT_TRUE(r.witness.count(0));
    EXPECT_EQ(r.witness.at(0).level, 1);
    EXPECT_EQ(r.witness.at(0).subset, std::vector<int>{0});
    EXPECT_GE(r.statistic[0], 1.0);
}

TEST(Select, MatchesDefinitionOnRandomSamples) {
    // fast path (block decomposition) against the definition-level scan
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int d = 6;
        const long n = 40;
        SparseFourierFunction f(d);
        if (seed % 2) f.set(MultiIndex::unit(d, static_cast<int>(seed % 5)), 0.8);
        const auto p = plan_thresholds(n, d, 2, 2.0, 2.0);
        const auto sample = sample_white_noise(f, n, observation_index_set(d, p.m.back(), 2), seed);
        EXPECT_EQ(select(sample, p, SelectVariant::kFull).selected, brute_select(sample, p, false));
        EXPECT_EQ(select(sample, p, SelectVariant::kSimple).selected, brute_select(sample, p, true));
    }
}

TEST(Select, FullEqualsSimpleAtLevelOne) {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const int d = 7;
        SparseFourierFunction f(d);
        f.set(MultiIndex::unit(d, 2), 0.7);
        const auto p = plan_thresholds(60, d, 1, 2.0, 2.0);
        const auto sample = sample_white_noise(f, 60, observation_index_set(d, p.m.back(), 1), seed);
        EXPECT_EQ(select(sample, p, SelectVariant::kFull).selected,
                  select(sample, p, SelectVariant::kSimple).selected);
    }
}

TEST(Select, MonotoneInObservationEnergy) {
    // inflating every |y_k| never removes a variable
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const int d = 6;
        SparseFourierFunction f(d);
        f.set(MultiIndex::unit(d, 1), 0.5);
        const auto p = plan_thresholds(80, d, 2, 2.0, 2.0);
        auto sample = sample_white_noise(f, 80, observation_index_set(d, p.m.back(), 2), seed);
        const auto before = select(sample, p).selected;
        rng::Stream st(seed + 777);
        for (auto& [k, y] : sample.observations) y *= (1.0 + st.next_unit());
        const auto after = select(sample, p).selected;
        EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    }
}

TEST(Select, GuardsAndCoverage) {
    const auto p = plan_thresholds(100, 30, 2, 2.0, 2.0);
    const auto s = zero_sample(30, 100, p.m.back(), 2);
    EXPECT_THROW(select(s, p), ValidationError);  // dimension guard

    const auto p8 = plan_thresholds(100, 8, 2, 2.0, 2.0);
    auto incomplete = zero_sample(8, 100, 1.0, 1);  // radius and weight too small
    EXPECT_THROW(select(incomplete, p8), ComputeError);
}

TEST(Adaptive, SinglePointGridReducesToPlainSelect) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const int d = 8;
        SparseFourierFunction f(d);
        f.set(MultiIndex::unit(d, 3), 0.9);
        const double vt = 2.5;
        const auto p = plan_thresholds(90, d, 2, 2.0, vt);
        const auto sample = sample_white_noise(f, 90, observation_index_set(d, p.m.back(), 2), seed);
        const std::vector<double> grid{vt};
        EXPECT_EQ(select_adaptive(sample, grid, 90, d, 2).selected,
                  select(sample, p, SelectVariant::kFull).selected);
    }
}

TEST(Adaptive, UnionContainsEveryMember) {
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
        const int d = 8;
        SparseFourierFunction f(d);
        f.set(MultiIndex::unit(d, 0), 0.8);
        f.set(MultiIndex::unit(d, 4), 0.6);
        const std::vector<double> grid{1.5, 2.0, 4.0};
        const auto sample = sample_white_noise(
            f, 70, observation_index_set(d, std::sqrt(2.0 * 4.0), 2), seed);
        const auto united = select_adaptive(sample, grid, 70, d, 2).selected;
        for (double vt : grid) {
            const auto p = plan_thresholds(70, d, 2, 2.0, vt);
            const auto one = select(sample, p).selected;
            EXPECT_TRUE(std::includes(united.begin(), united.end(), one.begin(), one.end()));
        }
    }
    const std::vector<double> empty_grid;
    EXPECT_THROW(select_adaptive(zero_sample(4, 10, 2.0, 2), empty_grid, 10, 4, 2), ValidationError);
}

TEST(Consistency, Arithmetic) {
    const auto p = plan_thresholds(200, 12, 2, 2.0, 2.0);
    const double tau = 1.0;
    const double ls = p.lambda[1];
    // kappa = 8 lambda_s (1+tau)/tau: holds with margin factor 2
    auto r = consistency_check(8.0 * ls * 2.0, 0.0, tau, p, 2);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.margin, 2.0, 1e-12);
    // kappa = 2 lambda_s (1+tau)/tau: fails
    auto r2 = consistency_check(2.0 * ls * 2.0, 0.0, tau, p, 2);
    EXPECT_FALSE(r2.holds);
    EXPECT_LT(r2.slack, 0.0);
}

TEST(Consistency, SharpThresholdBelowRoughOne) {
    // the refined type-II threshold at the matched confidence level is no
    // larger than 4 lambda_s on these configurations
    for (long n : {100L, 200L, 1000L}) {
        for (int d : {12, 30}) {
            const int dstar = 2;
            const auto p = plan_thresholds(n, d, dstar, 2.0, 2.0);
            const double alpha =
                2.0 * std::exp(-(2.0 - 1.0) * dstar * (1.0 + std::log(2.0 * d / dstar)));
            EXPECT_LE(sharp_relevance_threshold(p, dstar, alpha),
                      4.0 * p.lambda[static_cast<std::size_t>(dstar - 1)]);
        }
    }
}

TEST(SeparationRate, Examples) {
    // direct arithmetic at (n, d, s) = (1e3, 1e3, 2)
    const double lg = std::log(500.0);
    EXPECT_NEAR(separation_rate(1000, 1000, 2),
                std::max(std::pow(lg / 1e6, 1.0 / 3.0), 2.0 * lg / 1e3), 1e-15);
    // vanishes in n
    double prev = 1e300;
    for (long n : {100L, 1000L, 10000L, 100000L}) {
        const double r = separation_rate(n, 500, 3);
        EXPECT_LT(r, prev);
        prev = r;
    }
    // dominance flips with s at fixed n and d/s: the power term rules small s,
    // the linear-in-s term rules once s log(d/s) outgrows n
    const double lg2 = std::log(8.0);
    EXPECT_NEAR(separation_rate(100, 8 * 60, 60), 60.0 * lg2 / 100.0, 1e-15);
    EXPECT_GT(60.0 * lg2 / 100.0, std::pow(lg2 / 1e4, 2.0 / 64.0));
    EXPECT_NEAR(separation_rate(100, 8 * 2, 2), std::pow(lg2 / 1e4, 1.0 / 3.0), 1e-15);
    EXPECT_GT(std::pow(lg2 / 1e4, 1.0 / 3.0), 2.0 * lg2 / 100.0);
}

TEST(Selector, TypeOneErrorRateAtNull) {
    // null signal: selecting anything at all should be rare
    const int d = 12, dstar = 2;
    const long n = 100;
    const auto p = plan_thresholds(n, d, dstar, 2.0, 2.0);
    const SparseFourierFunction f(d);
    const auto obs = observation_index_set(d, p.m.back(), dstar);
    int nonempty = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        const auto sample = sample_white_noise(f, n, obs, static_cast<std::uint64_t>(t));
        nonempty += !select(sample, p).selected.empty();
    }
    EXPECT_LE(nonempty, 3);  // theory predicts rate ~9.4e-4
}
