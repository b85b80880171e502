// varsel: lattice-count driven variable selection toolbox.
//
// Subcommands: count, saddle, curves, thresholds, select, simulate-gwn,
// simulate-reg, select-reg, phase-diagram, montecarlo.
// Exit codes: 0 success, 2 validation/usage error, 1 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "varsel/experiments.hpp"
#include "varsel/io.hpp"

using namespace varsel;

namespace {

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    std::string out;
    std::string format;  // "", "csv", "json"
};

// Writes to --out when given, stdout otherwise.
class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ComputeError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::vector<double> parse_grid(const std::string& spec) {
    // "lo:hi:step" or comma-separated values
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw ValidationError("bad grid spec (want lo:hi:step): " + spec);
        for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw ValidationError("empty grid: " + spec);
    return out;
}

void cmd_count(const GlobalOpts& g, int dim, double gamma, double sq_bound,
               const std::string& constraint, const std::string& which) {
    double effective_gamma = gamma;
    if (sq_bound > 0.0) effective_gamma = sq_bound / dim;
    lattice::CountKind kind = lattice::CountKind::kN1;
    if (!which.empty()) {
        if (which == "n1") kind = lattice::CountKind::kN1;
        else if (which == "n2") kind = lattice::CountKind::kN2;
        else if (which == "n") kind = lattice::CountKind::kN;
        else throw ValidationError("--which must be n1, n2 or n");
    } else if (constraint == "k1-nonzero") {
        kind = lattice::CountKind::kN;
    } else if (constraint != "all") {
        throw ValidationError("--constraint must be all or k1-nonzero");
    }
    const auto value = lattice::count(dim, effective_gamma, kind);
    Output out(g.out);
    if (g.format == "json") {
        io::Json j;
        j["dim"] = dim;
        j["gamma"] = effective_gamma;
        j["squared_bound"] = lattice::floored_squared_bound(effective_gamma, dim);
        j["count"] = value.str();
        j["log_count"] = value > 0 ? lattice::log_count(value) : -std::numeric_limits<double>::infinity();
        out.stream() << j.dump(2) << "\n";
    } else {
        out.stream() << value.str() << "\n";
    }
}

const std::vector<std::string> kSaddleColumns{"gamma", "z", "rate", "curvature", "log_prefactor"};

void cmd_saddle(const GlobalOpts& g, double gamma, double tol) {
    const auto s = saddle::solve_saddle(gamma, tol);
    Output out(g.out);
    if (g.format == "csv") {
        io::CsvWriter csv(out.stream(), kSaddleColumns);
        csv.row({s.gamma, s.z, s.rate, s.curvature, s.log_prefactor});
    } else {
        out.stream() << io::to_json(s).dump(2) << "\n";
    }
}

void cmd_curves(const GlobalOpts& g, const std::string& which, const std::string& grid_spec) {
    const auto grid = parse_grid(grid_spec);
    Output out(g.out);
    if (which == "saddle-path" || which == "fig1") {
        io::CsvWriter csv(out.stream(), kSaddleColumns);
        for (const auto& s : mc::saddle_curve(grid))
            csv.row({s.gamma, s.z, s.rate, s.curvature, s.log_prefactor});
    } else if (which == "feasible-gamma" || which == "fig2") {
        io::CsvWriter csv(out.stream(), {"vartheta", "gamma_bar", "cap"});
        for (const auto& r : mc::feasible_gamma_curve(grid)) csv.row({r.a, r.b, r.c});
    } else if (which == "rate-gap" || which == "fig4") {
        io::CsvWriter csv(out.stream(), {"L", "rate_L", "rate_gamma_bar"});
        for (const auto& r : mc::rate_gap_curve(grid)) csv.row({r.a, r.b, r.c});
    } else {
        throw ValidationError("--which must be saddle-path|feasible-gamma|rate-gap (fig1|fig2|fig4)");
    }
}

void cmd_thresholds(const GlobalOpts& g, long n, int d, int dstar, double A, double vartheta) {
    const auto plan = plan_thresholds(n, d, dstar, A, vartheta);
    Output out(g.out);
    if (g.format == "json") {
        io::Json j;
        j["n"] = n;
        j["d"] = d;
        j["dstar"] = dstar;
        j["A"] = A;
        j["vartheta"] = vartheta;
        j["m"] = plan.m;
        j["lambda"] = plan.lambda;
        out.stream() << j.dump(2) << "\n";
    } else {
        io::CsvWriter csv(out.stream(), {"level", "m", "lambda"});
        for (std::size_t l = 0; l < plan.m.size(); ++l)
            csv.row({static_cast<double>(l + 1), plan.m[l], plan.lambda[l]});
    }
}

void cmd_select(const GlobalOpts& g, const std::string& sample_path, long n_override, int dstar,
                double A, double vartheta, const std::string& variant,
                const std::string& grid_spec) {
    const auto sample_json = io::load_json_file(sample_path);
    auto sample = io::sample_from_json(sample_json);
    if (n_override > 0) sample.n = n_override;
    SelectionResult res;
    if (!grid_spec.empty()) {
        res = select_adaptive(sample, parse_grid(grid_spec), sample.n, sample.d, dstar);
    } else {
        const auto plan = plan_thresholds(sample.n, sample.d, dstar, A, vartheta);
        res = select(sample, plan,
                     variant == "simple" ? SelectVariant::kSimple : SelectVariant::kFull);
    }
    Output out(g.out);
    out.stream() << io::to_json(res).dump(2) << "\n";
}

void cmd_simulate_gwn(const GlobalOpts& g, const std::string& function_path, long n, int dstar,
                      double vartheta, double max_radius) {
    const auto f = io::function_from_json(io::load_json_file(function_path));
    const double radius = max_radius > 0.0 ? max_radius : std::sqrt(vartheta * dstar);
    const auto obs = observation_index_set(f.dim, radius, dstar);
    const auto sample = sample_white_noise(f, n, obs, g.seed.value_or(0));
    Output out(g.out);
    out.stream() << io::to_json(sample).dump(2) << "\n";
}

void cmd_simulate_reg(const GlobalOpts& g, const std::string& function_path, long n, double sigma) {
    const auto f = io::function_from_json(io::load_json_file(function_path));
    const auto s = simulate_regression(f, n, sigma, DesignDensity::uniform(), g.seed.value_or(0));
    Output out(g.out);
    std::vector<std::string> header;
    for (int j = 0; j < s.d; ++j) header.push_back("x" + std::to_string(j + 1));
    header.push_back("y");
    io::CsvWriter csv(out.stream(), header);
    for (long i = 0; i < s.n; ++i) {
        std::vector<double> row(s.row(i).begin(), s.row(i).end());
        row.push_back(s.y[static_cast<std::size_t>(i)]);
        csv.row(row);
    }
}

RegressionSample read_regression_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty csv: " + path);
    int cols = 1;
    for (char ch : line) cols += (ch == ',');
    if (cols < 2) throw ValidationError("csv needs x columns and a y column");
    RegressionSample s;
    s.d = cols - 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (static_cast<int>(vals.size()) != cols) throw ValidationError("ragged csv row");
        for (int j = 0; j < s.d; ++j) s.x.push_back(vals[static_cast<std::size_t>(j)]);
        s.y.push_back(vals.back());
        ++s.n;
    }
    if (s.n == 0) throw ValidationError("csv has no data rows");
    return s;
}

void cmd_select_reg(const GlobalOpts& g, const std::string& data_path, int dstar, double vartheta,
                    double sigma, double L2, double g_min, double m_override,
                    double lambda_override, const std::string& strategy) {
    const auto s = read_regression_csv(data_path);
    const auto plan = plan_regression(s.n, s.d, dstar, vartheta, sigma, L2, g_min);
    const double m = m_override > 0.0 ? m_override : plan.m;
    const double lambda = lambda_override >= 0.0 ? lambda_override : plan.lambda;
    const auto sel = select_regression_detailed(
        s, DesignDensity::uniform(), m, lambda, dstar,
        strategy == "exhaustive" ? RegressionStrategy::kExhaustive : RegressionStrategy::kStepwise);
    Output out(g.out);
    io::Json j;
    j["selected"] = sel.selected;
    j["early_stopped"] = sel.early_stopped;
    j["m"] = m;
    j["lambda"] = lambda;
    out.stream() << j.dump(2) << "\n";
}

void cmd_phase_diagram(const GlobalOpts& g, const std::string& n_grid, const std::string& kappa_grid,
                       const std::string& dstar_grid, int d, double ratio, double tau, double A,
                       double alpha) {
    Output out(g.out);
    io::CsvWriter csv(out.stream(),
                      {"n", "kappa", "dstar", "lambda_s", "consistent", "consistency_margin",
                       "ball_impossible", "ball_margin", "point_impossible", "point_margin",
                       "classification"});
    for (double nd : parse_grid(n_grid)) {
        for (double kappa : parse_grid(kappa_grid)) {
            for (double dsd : parse_grid(dstar_grid)) {
                const long n = static_cast<long>(nd);
                const int dstar = static_cast<int>(dsd);
                const double L = ratio * kappa;
                const auto plan = plan_thresholds(n, d, dstar, A, L * (1.0 + tau) / kappa);
                const auto cons = consistency_check(kappa, L, tau, plan, dstar);
                RegimeQuery q;
                q.n = n;
                q.d = d;
                q.dstar = dstar;
                q.kappa = kappa;
                q.L = L;
                q.alpha = alpha;
                const auto ball = impossibility_check(q, ImpossibilityMode::kBallPrior);
                const auto point = impossibility_check(q, ImpossibilityMode::kPointPrior);
                const bool impossible = ball.impossible || point.impossible;
                const double cls = cons.holds && impossible ? -1.0  // contradiction: must not happen
                                   : cons.holds             ? 1.0
                                   : impossible             ? 2.0
                                                            : 0.0;
                csv.row({static_cast<double>(n), kappa, static_cast<double>(dstar),
                         plan.lambda[static_cast<std::size_t>(dstar - 1)],
                         cons.holds ? 1.0 : 0.0, cons.margin, ball.impossible ? 1.0 : 0.0,
                         ball.margin, point.impossible ? 1.0 : 0.0, point.margin, cls});
            }
        }
    }
}

void cmd_montecarlo(const GlobalOpts& g, const std::string& config_path, bool with_log) {
    auto cfg = io::config_from_json(io::load_json_file(config_path));
    if (g.seed) cfg.seed = *g.seed;
    if (g.jobs > 0) cfg.jobs = g.jobs;
    const auto report = mc::run_monte_carlo(cfg);
    Output out(g.out);
    out.stream() << io::to_json(report, with_log).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice-count driven variable selection for nonparametric models"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    GlobalOpts g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "base RNG seed");
    app.add_option("--jobs", g.jobs, "worker threads (0 = VARSEL_JOBS env or hardware)");
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--format", g.format, "output format where applicable")
        ->check(CLI::IsMember({"csv", "json"}));

    // count
    auto* count = app.add_subcommand("count", "exact lattice-point counts in a ball");
    int c_dim = 1;
    double c_gamma = 0.0, c_sq = 0.0;
    std::string c_constraint = "all", c_which;
    count->add_option("--dim", c_dim, "dimension")->required();
    count->add_option("--gamma", c_gamma, "squared-radius scale (bound is gamma*dim)");
    count->add_option("--sq-bound", c_sq, "explicit squared-norm bound (overrides --gamma)");
    count->add_option("--constraint", c_constraint, "all | k1-nonzero");
    count->add_option("--which", c_which, "n1 | n2 | n (overrides --constraint)");

    // saddle
    auto* sad = app.add_subcommand("saddle", "stationary-point data for one gamma");
    double s_gamma = 1.0, s_tol = 1e-12;
    sad->add_option("--gamma", s_gamma, "squared-radius scale")->required();
    sad->add_option("--tol", s_tol, "solver tolerance");

    // curves
    auto* cur = app.add_subcommand("curves", "CSV curve data for the saddle quantities");
    std::string cu_which = "saddle-path", cu_grid = "0.5:8:0.5";
    cur->add_option("--which", cu_which, "saddle-path | feasible-gamma | rate-gap (fig1|fig2|fig4)");
    cur->add_option("--grid", cu_grid, "lo:hi:step or comma list");

    // thresholds
    auto* thr = app.add_subcommand("thresholds", "selector tuning for given sizes");
    long t_n = 100;
    int t_d = 10, t_dstar = 2;
    double t_A = 2.0, t_vt = 2.0;
    thr->add_option("--n", t_n, "sample size")->required();
    thr->add_option("--d", t_d, "ambient dimension")->required();
    thr->add_option("--dstar", t_dstar, "sparsity budget")->required();
    thr->add_option("--A", t_A, "confidence exponent (> 1)");
    thr->add_option("--vartheta", t_vt, "smoothness-to-relevance ratio knob");

    // select
    auto* sel = app.add_subcommand("select", "run the coefficient-block selector on a sample");
    std::string se_sample, se_variant = "full", se_grid;
    long se_n = 0;
    int se_dstar = 2;
    double se_A = 2.0, se_vt = 2.0;
    sel->add_option("--sample", se_sample, "sample json path")->required();
    sel->add_option("--dstar", se_dstar, "sparsity budget")->required();
    sel->add_option("--n", se_n, "override the sample's n");
    sel->add_option("--A", se_A, "confidence exponent");
    sel->add_option("--vartheta", se_vt, "tuning knob");
    sel->add_option("--variant", se_variant, "full | simple");
    sel->add_option("--adaptive-grid", se_grid, "vartheta grid: union selector at A = 2");

    // simulate-gwn
    auto* sg = app.add_subcommand("simulate-gwn", "draw a sequence-model sample for a function");
    std::string sg_function;
    long sg_n = 100;
    int sg_dstar = 2;
    double sg_vt = 2.0, sg_radius = 0.0;
    sg->add_option("--function", sg_function, "function spec json")->required();
    sg->add_option("--n", sg_n, "inverse noise variance")->required();
    sg->add_option("--dstar", sg_dstar, "sparsity budget")->required();
    sg->add_option("--vartheta", sg_vt, "tuning knob (sets the window radius)");
    sg->add_option("--max-radius", sg_radius, "explicit observation radius override");

    // simulate-reg
    auto* sr = app.add_subcommand("simulate-reg", "draw a random-design sample as CSV");
    std::string sr_function;
    long sr_n = 100;
    double sr_sigma = 1.0;
    sr->add_option("--function", sr_function, "function spec json")->required();
    sr->add_option("--n", sr_n, "sample size")->required();
    sr->add_option("--sigma", sr_sigma, "noise scale");

    // select-reg
    auto* rg = app.add_subcommand("select-reg", "max-coefficient selector on a CSV sample");
    std::string rg_data, rg_strategy = "stepwise";
    int rg_dstar = 2;
    double rg_vt = 2.0, rg_sigma = 1.0, rg_L2 = 1.0, rg_gmin = 1.0, rg_m = 0.0, rg_lambda = -1.0;
    rg->add_option("--data", rg_data, "csv path (x1..xd, y)")->required();
    rg->add_option("--dstar", rg_dstar, "sparsity budget")->required();
    rg->add_option("--vartheta", rg_vt, "tuning knob");
    rg->add_option("--sigma", rg_sigma, "noise scale");
    rg->add_option("--L2", rg_L2, "quadratic-mean bound on the function");
    rg->add_option("--gmin", rg_gmin, "design density floor");
    rg->add_option("--m", rg_m, "window radius override");
    rg->add_option("--lambda", rg_lambda, "threshold override");
    rg->add_option("--strategy", rg_strategy, "stepwise | exhaustive");

    // phase-diagram
    auto* pd = app.add_subcommand("phase-diagram", "sweep conditions over (n, kappa, dstar)");
    std::string pd_n = "100:1000:300", pd_kappa = "0.1,1,10", pd_dstar = "1:3:1";
    int pd_d = 60;
    double pd_ratio = 2.0, pd_tau = 1.0, pd_A = 2.0, pd_alpha = 0.25;
    pd->add_option("--n-grid", pd_n, "grid for n");
    pd->add_option("--kappa-grid", pd_kappa, "grid for kappa");
    pd->add_option("--dstar-grid", pd_dstar, "grid for dstar");
    pd->add_option("--d", pd_d, "ambient dimension");
    pd->add_option("--ratio", pd_ratio, "L / kappa (> 1)");
    pd->add_option("--tau", pd_tau, "truncation slack");
    pd->add_option("--A", pd_A, "confidence exponent");
    pd->add_option("--alpha", pd_alpha, "error-floor parameter in (0, 1/2)");

    // montecarlo
    auto* mcmd = app.add_subcommand("montecarlo", "seeded replication harness");
    std::string mc_config;
    bool mc_log = false;
    mcmd->add_option("--config", mc_config, "experiment config json")->required();
    mcmd->add_flag("--log", mc_log, "include the per-trial log in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage/validation problems exit 2
    }

    if (seed_opt->count() > 0) g.seed = seed_value;

    try {
        if (*count) cmd_count(g, c_dim, c_gamma, c_sq, c_constraint, c_which);
        else if (*sad) cmd_saddle(g, s_gamma, s_tol);
        else if (*cur) cmd_curves(g, cu_which, cu_grid);
        else if (*thr) cmd_thresholds(g, t_n, t_d, t_dstar, t_A, t_vt);
        else if (*sel) cmd_select(g, se_sample, se_n, se_dstar, se_A, se_vt, se_variant, se_grid);
        else if (*sg) cmd_simulate_gwn(g, sg_function, sg_n, sg_dstar, sg_vt, sg_radius);
        else if (*sr) cmd_simulate_reg(g, sr_function, sr_n, sr_sigma);
        else if (*rg) cmd_select_reg(g, rg_data, rg_dstar, rg_vt, rg_sigma, rg_L2, rg_gmin, rg_m,
                                     rg_lambda, rg_strategy);
        else if (*pd) cmd_phase_diagram(g, pd_n, pd_kappa, pd_dstar, pd_d, pd_ratio, pd_tau, pd_A,
                                        pd_alpha);
        else if (*mcmd) cmd_montecarlo(g, mc_config, mc_log);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
