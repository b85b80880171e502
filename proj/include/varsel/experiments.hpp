#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "varsel/feasibility.hpp"
#include "varsel/regression.hpp"
#include "varsel/selector.hpp"

namespace varsel::mc {

// ---- instances ------------------------------------------------------------

struct InstanceSpec {
    enum class Kind { kNull, kSingleFrequency, kBallSigns, kExplicit };
    Kind kind = Kind::kNull;
    std::vector<int> support;       // relevant coordinates
    double amplitude = 0.0;         // 0 on ball-signs means the normalizing default
    int gamma = 1;                  // ball-signs radius scale
    std::uint64_t sign_seed = 0;    // ball-signs pattern
    SparseFourierFunction function{0};  // kExplicit payload
};

inline SparseFourierFunction build_instance(const InstanceSpec& spec, int d) {
    switch (spec.kind) {
        case InstanceSpec::Kind::kNull:
            return SparseFourierFunction(d);
        case InstanceSpec::Kind::kSingleFrequency:
            return make_single_frequency_instance(d, spec.support, spec.amplitude);
        case InstanceSpec::Kind::kBallSigns: {
            const auto n1 = lattice::to_double(lattice::count(
                static_cast<int>(spec.support.size()), static_cast<double>(spec.gamma),
                lattice::CountKind::kN1));
            std::vector<int> signs;
            rng::Stream st(spec.sign_seed);
            for (long i = 0; i < static_cast<long>(n1); ++i)
                signs.push_back((st.next_bits() & 1u) ? 1 : -1);
            const double a = spec.amplitude > 0.0
                                 ? spec.amplitude
                                 : hard_instance_amplitude(static_cast<int>(spec.support.size()),
                                                           spec.gamma);
            return make_hard_instance(d, spec.support, spec.gamma, signs, a);
        }
        case InstanceSpec::Kind::kExplicit:
            require(spec.function.dim == d, "instance: explicit function dimension mismatch");
            return spec.function;
    }
    throw ValidationError("instance: bad kind");
}

// ---- configuration ---------------------------------------------------------

struct GwnSettings {
    double A = 2.0;
    double vartheta = 2.0;
    SelectVariant variant = SelectVariant::kFull;
    std::vector<double> adaptive_grid;  // nonempty: union selector over the grid at A = 2
};

struct RegressionSettings {
    double sigma = 1.0;
    double vartheta = 2.0;
    double L2 = 1.0;
    double g_min = 1.0;
    RegressionStrategy strategy = RegressionStrategy::kStepwise;
    std::optional<double> m_override;
    std::optional<double> lambda_override;
};

struct ExperimentConfig {
    enum class Model { kGwn, kRegression };
    Model model = Model::kGwn;
    InstanceSpec instance;
    long n = 100;
    int d = 2;
    int dstar = 1;
    GwnSettings gwn;
    RegressionSettings regression;
    long trials = 1;
    std::uint64_t seed = 0;
    int jobs = 0;  // 0: VARSEL_JOBS env or hardware
    std::optional<double> type1_tolerance;  // recorded pass/fail targets
    std::optional<double> exact_min;
};

// ---- results ---------------------------------------------------------------

struct TrialOutcome {
    long trial = 0;
    std::vector<int> selected;
    bool type1 = false;  // selected set not inside the true support
    bool type2 = false;  // true support not inside the selected set
    bool exact = false;
};

struct WilsonInterval {
    double lo = 0.0, hi = 1.0;
};

inline WilsonInterval wilson95(long successes, long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct ErrorRates {
    long trials = 0;
    double type1 = 0.0, type2 = 0.0, exact = 0.0;
    WilsonInterval type1_ci, type2_ci, exact_ci;
};

struct BoundReport {
    double theory_type1_bound = 1.0;  // on P(selected not inside true support)
    double theory_exact_bound = 0.0;  // lower bound on P(exact recovery), when the tuning applies
    std::optional<bool> type1_pass;   // Wilson upper endpoint vs configured tolerance
    std::optional<bool> exact_pass;   // Wilson upper endpoint reaches the configured target
};

struct MonteCarloReport {
    ErrorRates rates;
    BoundReport bounds;
    std::vector<int> true_support;
    std::vector<TrialOutcome> log;
};

inline int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VARSEL_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

namespace detail {

inline bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

template <typename TrialFn>
inline std::vector<TrialOutcome> run_trials(long trials, int jobs, const TrialFn& fn) {
    std::vector<TrialOutcome> log(static_cast<std::size_t>(trials));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            const long t = next.fetch_add(1);
            if (t >= trials) return;
            log[static_cast<std::size_t>(t)] = fn(t);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return log;
}

}  // namespace detail

// Seeded Monte Carlo over independent trials. Trial t draws its entire
// randomness from a counter-derived seed, so results are identical at any
// parallelism degree.
inline MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg) {
    require(cfg.trials >= 1, "monte carlo: trials must be >= 1");
    const int jobs = resolve_jobs(cfg.jobs);

    const SparseFourierFunction f = build_instance(cfg.instance, cfg.d);
    const auto truth = analyze(f, 0.0, std::numeric_limits<double>::infinity(), cfg.d).support;

    MonteCarloReport report;
    report.true_support = truth;

    const double lg = 1.0 + std::log(2.0 * static_cast<double>(cfg.d) / cfg.dstar);

    if (cfg.model == ExperimentConfig::Model::kGwn) {
        const bool adaptive = !cfg.gwn.adaptive_grid.empty();
        double vt_max = cfg.gwn.vartheta;
        for (double v : cfg.gwn.adaptive_grid) vt_max = std::max(vt_max, v);
        const auto index_set = observation_index_set_sq(
            cfg.d, lattice::floored_squared_bound(vt_max, cfg.dstar), cfg.dstar);
        const auto plan = plan_thresholds(cfg.n, cfg.d, cfg.dstar, cfg.gwn.A, cfg.gwn.vartheta);

        report.log = detail::run_trials(cfg.trials, jobs, [&](long t) {
            const auto sample =
                sample_white_noise(f, cfg.n, index_set, rng::trial_seed(cfg.seed, static_cast<std::uint64_t>(t)));
            const SelectionResult sel =
                adaptive ? select_adaptive(sample, cfg.gwn.adaptive_grid, cfg.n, cfg.d, cfg.dstar)
                         : select(sample, plan, cfg.gwn.variant);
            TrialOutcome out;
            out.trial = t;
            out.selected = sel.selected;
            out.type1 = !detail::subset_of(out.selected, truth);
            out.type2 = !detail::subset_of(truth, out.selected);
            out.exact = out.selected == truth;
            return out;
        });

        const double base = std::exp(-cfg.dstar * lg);  // (2ed/d*)^{-d*}
        if (adaptive) {
            const double K = static_cast<double>(cfg.gwn.adaptive_grid.size());
            report.bounds.theory_type1_bound = std::min(1.0, K * base);
            report.bounds.theory_exact_bound = std::max(0.0, 1.0 - (K + 2.0) * base);
        } else {
            const double b = std::exp(-cfg.dstar * (cfg.gwn.A - 1.0) * lg);
            report.bounds.theory_type1_bound = std::min(1.0, b);
            report.bounds.theory_exact_bound = std::max(0.0, 1.0 - 3.0 * b);
        }
    } else {
        const auto g = DesignDensity::uniform();
        const auto rp = plan_regression(cfg.n, cfg.d, cfg.dstar, cfg.regression.vartheta,
                                        cfg.regression.sigma, cfg.regression.L2,
                                        cfg.regression.g_min);
        const double m = cfg.regression.m_override.value_or(rp.m);
        const double lambda = cfg.regression.lambda_override.value_or(rp.lambda);

        report.log = detail::run_trials(cfg.trials, jobs, [&](long t) {
            const auto sample = simulate_regression(
                f, cfg.n, cfg.regression.sigma, g, rng::trial_seed(cfg.seed, static_cast<std::uint64_t>(t)));
            TrialOutcome out;
            out.trial = t;
            out.selected = select_regression(sample, g, m, lambda, cfg.dstar, cfg.regression.strategy);
            out.type1 = !detail::subset_of(out.selected, truth);
            out.type2 = !detail::subset_of(truth, out.selected);
            out.exact = out.selected == truth;
            return out;
        });

        const double b = std::exp(-cfg.dstar * std::log(8.0 * cfg.d / cfg.dstar));
        report.bounds.theory_type1_bound = std::min(1.0, b);
        report.bounds.theory_exact_bound = std::max(0.0, 1.0 - b);
    }

    long c1 = 0, c2 = 0, ce = 0;
    for (const auto& o : report.log) {
        c1 += o.type1;
        c2 += o.type2;
        ce += o.exact;
    }
    auto& r = report.rates;
    r.trials = cfg.trials;
    r.type1 = static_cast<double>(c1) / static_cast<double>(cfg.trials);
    r.type2 = static_cast<double>(c2) / static_cast<double>(cfg.trials);
    r.exact = static_cast<double>(ce) / static_cast<double>(cfg.trials);
    r.type1_ci = wilson95(c1, cfg.trials);
    r.type2_ci = wilson95(c2, cfg.trials);
    r.exact_ci = wilson95(ce, cfg.trials);

    // Pass/fail against configured targets uses interval endpoints, never the
    // raw point estimate.
    if (cfg.type1_tolerance) report.bounds.type1_pass = r.type1_ci.hi <= *cfg.type1_tolerance;
    if (cfg.exact_min) report.bounds.exact_pass = r.exact_ci.hi >= *cfg.exact_min;
    return report;
}

// ---- curve data ------------------------------------------------------------

struct CurveRow {
    double a = 0.0, b = 0.0, c = 0.0;
};

// Full solution rows over a gamma grid; z and rate strictly increase.
inline std::vector<saddle::SaddleData> saddle_curve(std::span<const double> gammas) {
    require(!gammas.empty(), "curve: empty grid");
    std::vector<saddle::SaddleData> rows;
    for (double g : gammas) rows.push_back(saddle::solve_saddle(g));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        require(gammas[i] > gammas[i - 1], "curve: grid must increase");
        if (!(rows[i].z > rows[i - 1].z) || !(rows[i].rate > rows[i - 1].rate))
            throw ComputeError("curve: saddle outputs failed to increase");
    }
    return rows;
}

// (vartheta, largest feasible radius scale or 0, vartheta); the middle column
// never exceeds the last and never decreases.
inline std::vector<CurveRow> feasible_gamma_curve(std::span<const double> varthetas) {
    require(!varthetas.empty(), "curve: empty grid");
    std::vector<CurveRow> rows;
    for (double vt : varthetas) {
        const auto gb = saddle::largest_feasible_gamma(vt);
        rows.push_back({vt, gb ? static_cast<double>(*gb) : 0.0, vt});
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].b > rows[i].c) throw ComputeError("curve: feasible scale exceeded its cap");
        if (i > 0 && rows[i].b < rows[i - 1].b)
            throw ComputeError("curve: feasible scale decreased");
    }
    return rows;
}

// (L, rate at L, rate at the largest feasible scale for L); second column
// dominates the third.
inline std::vector<CurveRow> rate_gap_curve(std::span<const double> Ls) {
    require(!Ls.empty(), "curve: empty grid");
    std::vector<CurveRow> rows;
    for (double L : Ls) {
        const auto gb = saddle::largest_feasible_gamma(L);
        if (!gb) throw ValidationError("curve: grid value below the feasible range");
        rows.push_back({L, saddle::solve_saddle(L).rate,
                        saddle::solve_saddle(static_cast<double>(*gb)).rate});
    }
    for (const auto& r : rows)
        if (r.c > r.b) throw ComputeError("curve: rate ordering violated");
    return rows;
}

}  // namespace varsel::mc
