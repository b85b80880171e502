#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "varsel/experiments.hpp"
#include "varsel/io.hpp"

using namespace varsel;

TEST(Wilson, IntervalSanity) {
    const auto all = mc::wilson95(100, 100);
    EXPECT_GT(all.lo, 0.95);
    EXPECT_EQ(all.hi, 1.0);
    const auto none = mc::wilson95(0, 1000);
    EXPECT_NEAR(none.lo, 0.0, 1e-12);
    EXPECT_NEAR(none.hi, 0.0038, 5e-4);
    const auto half = mc::wilson95(50, 100);
    EXPECT_LT(half.lo, 0.5);
    EXPECT_GT(half.hi, 0.5);
}

TEST(Instances, Builders) {
    mc::InstanceSpec null;
    EXPECT_TRUE(mc::build_instance(null, 5).coefficients.empty());

    mc::InstanceSpec sf;
    sf.kind = mc::InstanceSpec::Kind::kSingleFrequency;
    sf.support = {1, 3};
    sf.amplitude = 0.7;
    const auto f = mc::build_instance(sf, 5);
    EXPECT_EQ(f.coefficients.size(), 2u);

    mc::InstanceSpec ball;
    ball.kind = mc::InstanceSpec::Kind::kBallSigns;
    ball.support = {0, 1};
    ball.gamma = 1;
    ball.sign_seed = 3;
    const auto g = mc::build_instance(ball, 4);
    const auto rep = analyze(g, 0.0, 100.0, 2);
    EXPECT_EQ(rep.support, (std::vector<int>{0, 1}));
    for (int j : rep.support) EXPECT_NEAR(rep.relevance[static_cast<std::size_t>(j)], 1.0, 1e-12);
}

TEST(MonteCarlo, ReproducibleAcrossParallelism) {
    mc::ExperimentConfig cfg;
    cfg.model = mc::ExperimentConfig::Model::kGwn;
    cfg.instance.kind = mc::InstanceSpec::Kind::kSingleFrequency;
    cfg.instance.support = {0};
    cfg.instance.amplitude = 0.8;
    cfg.n = 100;
    cfg.d = 8;
    cfg.dstar = 2;
    cfg.gwn.vartheta = 2.0;
    cfg.trials = 40;
    cfg.seed = 11;
    cfg.jobs = 1;
    const auto a = mc::run_monte_carlo(cfg);
    cfg.jobs = 4;
    const auto b = mc::run_monte_carlo(cfg);
    // byte-identical reports regardless of parallelism
    EXPECT_EQ(io::to_json(a, true).dump(), io::to_json(b, true).dump());
}

TEST(MonteCarlo, NullInstanceTypeOne) {
    mc::ExperimentConfig cfg;
    cfg.n = 100;
    cfg.d = 12;
    cfg.dstar = 2;
    cfg.gwn.A = 2.0;
    cfg.gwn.vartheta = 2.0;
    cfg.trials = 200;
    cfg.seed = 5;
    cfg.type1_tolerance = 0.02;
    const auto r = mc::run_monte_carlo(cfg);
    EXPECT_TRUE(r.true_support.empty());
    EXPECT_LE(r.rates.exact, 1.0 - std::max(r.rates.type1, r.rates.type2) + 1e-12);
    EXPECT_LE(r.rates.type1, 0.01);
    EXPECT_NEAR(r.bounds.theory_type1_bound, 9.4e-4, 1e-4);
    ASSERT_TRUE(r.bounds.type1_pass.has_value());
    EXPECT_TRUE(*r.bounds.type1_pass);
    // an exact-recovery run counts empty = empty
    EXPECT_GT(r.rates.exact, 0.9);
}

TEST(MonteCarlo, SubSeparationSignalIsMissed) {
    // relevance far below the separation rate: recovery mostly fails
    mc::ExperimentConfig cfg;
    cfg.instance.kind = mc::InstanceSpec::Kind::kSingleFrequency;
    cfg.instance.support = {0, 1};
    cfg.n = 200;
    cfg.d = 12;
    cfg.dstar = 2;
    cfg.gwn.vartheta = 2.0;
    cfg.instance.amplitude = std::sqrt(0.01 * separation_rate(cfg.n, cfg.d, 2));
    cfg.trials = 60;
    cfg.seed = 17;
    const auto r = mc::run_monte_carlo(cfg);
    EXPECT_LT(r.rates.exact, 0.5);
}

TEST(MonteCarlo, RegressionModelSmoke) {
    mc::ExperimentConfig cfg;
    cfg.model = mc::ExperimentConfig::Model::kRegression;
    cfg.instance.kind = mc::InstanceSpec::Kind::kSingleFrequency;
    cfg.instance.support = {0};
    cfg.instance.amplitude = 1.2;
    cfg.n = 800;
    cfg.d = 5;
    cfg.dstar = 1;
    cfg.regression.sigma = 0.3;
    cfg.regression.vartheta = 2.0;
    cfg.regression.L2 = 1.2;
    cfg.trials = 30;
    cfg.seed = 23;
    const auto r = mc::run_monte_carlo(cfg);
    EXPECT_GE(r.rates.exact, 0.9);
    EXPECT_EQ(r.true_support, std::vector<int>{0});
}

TEST(Curves, SaddlePath) {
    std::vector<double> grid;
    for (double g = 0.5; g <= 8.0; g += 0.5) grid.push_back(g);
    const auto rows = mc::saddle_curve(grid);
    ASSERT_EQ(rows.size(), grid.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GT(rows[i].z, rows[i - 1].z);
        EXPECT_GT(rows[i].rate, rows[i - 1].rate);
        EXPECT_GT(rows[i].curvature, 0.0);
    }
}

TEST(MonteCarlo, AdaptiveGridAboveTrueRatioStillRecovers) {
    // grid misses the true ratio from below: every point sits above it, and
    // the union selector still recovers once the relevance clears the
    // threshold of the smallest grid point
    const long n = 200;
    const int d = 12, dstar = 2;
    const double tau = 1.0;
    const auto plan4 = plan_thresholds(n, d, dstar, 2.0, 4.0);
    const double kappa = 1.1 * 4.0 * plan4.lambda[1] * (1.0 + tau) / tau;

    mc::ExperimentConfig cfg;
    cfg.instance.kind = mc::InstanceSpec::Kind::kSingleFrequency;
    cfg.instance.support = {0, 1};
    cfg.instance.amplitude = std::sqrt(kappa);
    cfg.n = n;
    cfg.d = d;
    cfg.dstar = dstar;
    cfg.gwn.adaptive_grid = {4.0, 8.0};  // true ratio is 2
    cfg.trials = 150;
    cfg.seed = 31;
    const auto r = mc::run_monte_carlo(cfg);
    EXPECT_GE(r.rates.exact, 0.95);
}

TEST(Curves, FeasibleScaleUnderCap) {
    std::vector<double> grid;
    for (double v = 1.2; v <= 50.0; v += 1.6) grid.push_back(v);
    const auto rows = mc::feasible_gamma_curve(grid);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_LE(rows[i].b, rows[i].c);
        if (i > 0) {
            EXPECT_GE(rows[i].b, rows[i - 1].b);
        }
    }
}

TEST(Curves, RateGapShrinks) {
    std::vector<double> grid{3, 5, 10, 20, 50};
    const auto rows = mc::rate_gap_curve(grid);
    for (const auto& r : rows) EXPECT_LE(r.c, r.b);
    const double first_gap = (rows.front().b - rows.front().c) / rows.front().b;
    const double last_gap = (rows.back().b - rows.back().c) / rows.back().b;
    EXPECT_LT(last_gap, first_gap);
    EXPECT_LT(last_gap, 0.02);
}

TEST(Io, ConfigParsing) {
    const auto j = io::Json::parse(R"({
        "model": "gwn",
        "instance": {"type": "single-frequency", "support": [0, 2], "amplitude": 1.5},
        "n": 250, "d": 10, "dstar": 2,
        "gwn": {"A": 2.0, "vartheta": 3.0, "variant": "simple"},
        "trials": 7, "seed": 99, "jobs": 2,
        "exact_min": 0.9
    })");
    const auto cfg = io::config_from_json(j);
    EXPECT_EQ(cfg.model, mc::ExperimentConfig::Model::kGwn);
    EXPECT_EQ(cfg.n, 250);
    EXPECT_EQ(cfg.dstar, 2);
    EXPECT_EQ(cfg.gwn.variant, SelectVariant::kSimple);
    EXPECT_EQ(cfg.instance.support, (std::vector<int>{0, 2}));
    EXPECT_EQ(cfg.trials, 7);
    ASSERT_TRUE(cfg.exact_min.has_value());
    EXPECT_DOUBLE_EQ(*cfg.exact_min, 0.9);
    EXPECT_THROW(io::config_from_json(io::Json::parse(R"({"model": "banana"})")), ValidationError);
}

TEST(Io, CsvFormatting) {
    std::ostringstream out;
    io::CsvWriter csv(out, {"a", "b"});
    csv.row({1.5, 0.25});
    csv.row({3.0, 1e-9});
    EXPECT_EQ(out.str(), "a,b\n1.5,0.25\n3,1e-09\n");
}

TEST(Io, SampleRoundTrip) {
    SparseFourierFunction f(3);
    f.set(MultiIndex({0, 1, -1}), 0.4);
    const auto obs = observation_index_set(3, 1.5, 2);
    const auto s = sample_white_noise(f, 64, obs, 3);
    const auto j = io::to_json(s);
    const auto back = io::sample_from_json(j);
    EXPECT_EQ(back.d, s.d);
    EXPECT_EQ(back.n, s.n);
    EXPECT_EQ(back.observations, s.observations);
}
