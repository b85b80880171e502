#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "varsel/white_noise.hpp"

using namespace varsel;

TEST(ObservationSet, CoversStatisticWindows) {
    const int d = 6, dstar = 2;
    const double m = 2.0;
    const auto obs = observation_index_set(d, m, dstar);
    EXPECT_TRUE(std::is_sorted(obs.begin(), obs.end()));
    for (const auto& k : obs) {
        EXPECT_GE(k.weight(), 1);
        EXPECT_LE(k.weight(), dstar);
        EXPECT_LE(k.norm_sq(), 4);
    }
    // every subset window lives inside the observation set
    lattice::for_each_subset(d, dstar, [&](const std::vector<int>& I) {
        for (int j : I)
            for (const auto& k : lattice::enumerate_support_subset(d, j, m, I))
                EXPECT_TRUE(std::binary_search(obs.begin(), obs.end(), k));
    });
}

TEST(WhiteNoise, DeterministicAndOrderIndependent) {
    SparseFourierFunction f(4);
    f.set(MultiIndex::unit(4, 1), 0.8);
    auto obs = observation_index_set(4, 2.0, 2);
    const auto s1 = sample_white_noise(f, 50, obs, 99);
    const auto s2 = sample_white_noise(f, 50, obs, 99);
    ASSERT_EQ(s1.observations.size(), s2.observations.size());
    for (const auto& [k, y] : s1.observations) EXPECT_EQ(y, s2.at(k));  // bitwise

    // permuting the requested order changes nothing
    std::shuffle(obs.begin(), obs.end(), std::mt19937{7});
    const auto s3 = sample_white_noise(f, 50, obs, 99);
    for (const auto& [k, y] : s1.observations) EXPECT_EQ(y, s3.at(k));

    const auto other = sample_white_noise(f, 50, obs, 100);
    int differing = 0;
    for (const auto& [k, y] : s1.observations) differing += (y != other.at(k));
    EXPECT_GT(differing, 0);
}

TEST(WhiteNoise, MeanAndVarianceAtScale) {
    // 1e4 observed indices of the zero function: empirical mean within 3
    // standard errors of zero, variance within 5% of 1/n
    const int d = 100;
    SparseFourierFunction f(d);
    std::vector<MultiIndex> obs;
    for (int j = 0; j < d; ++j)
        for (int c = 1; c <= 50; ++c) {
            obs.push_back(MultiIndex::unit(d, j, static_cast<std::int32_t>(c)));
            obs.push_back(MultiIndex::unit(d, j, static_cast<std::int32_t>(-c)));
        }
    ASSERT_EQ(obs.size(), 10000u);
    const long n = 4;
    const auto s = sample_white_noise(f, n, obs, 2024);
    double mean = 0.0, var = 0.0;
    for (const auto& [k, y] : s.observations) mean += y;
    mean /= static_cast<double>(obs.size());
    for (const auto& [k, y] : s.observations) var += (y - mean) * (y - mean);
    var /= static_cast<double>(obs.size() - 1);
    const double se = 1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(obs.size()));
    EXPECT_LE(std::abs(mean), 3.0 * se);
    EXPECT_NEAR(var, 1.0 / static_cast<double>(n), 0.05 / static_cast<double>(n));
}

TEST(WhiteNoise, VarianceAcrossReplications) {
    // one fixed index, n = 100, 1e4 replications: Var(y_k) close to 1/n
    SparseFourierFunction f(3);
    f.set(MultiIndex::unit(3, 0), 0.3);
    const std::vector<MultiIndex> obs{MultiIndex::unit(3, 0)};
    const long n = 100;
    double mean = 0.0, sq = 0.0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
        const double y = sample_white_noise(f, n, obs, static_cast<std::uint64_t>(r)).at(obs[0]);
        mean += y;
        sq += y * y;
    }
    mean /= reps;
    const double var = sq / reps - mean * mean;
    EXPECT_NEAR(mean, 0.3, 3.0 / std::sqrt(static_cast<double>(n) * reps));
    EXPECT_NEAR(var, 1.0 / static_cast<double>(n), 0.05 / static_cast<double>(n));
}

TEST(WhiteNoise, SignalShiftsObservation) {
    SparseFourierFunction f(2);
    f.set(MultiIndex({1, 0}), 2.0);
    const auto obs = observation_index_set(2, 1.5, 1);
    const auto with = sample_white_noise(f, 1000, obs, 5);
    const auto without = sample_white_noise(SparseFourierFunction(2), 1000, obs, 5);
    EXPECT_NEAR(with.at(MultiIndex({1, 0})) - without.at(MultiIndex({1, 0})), 2.0, 1e-12);
}

TEST(WhiteNoise, Errors) {
    SparseFourierFunction f(2);
    EXPECT_THROW(sample_white_noise(f, 0, observation_index_set(2, 1.0, 1), 1), ValidationError);
    EXPECT_THROW(sample_white_noise(f, 10, {}, 1), ValidationError);
    const auto s = sample_white_noise(f, 10, observation_index_set(2, 1.0, 1), 1);
    EXPECT_THROW(s.at(MultiIndex({5, 5})), ComputeError);
}
