#pragma once

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "varsel/experiments.hpp"

// JSON and CSV (de)serialization for the file formats the CLI speaks.
// JSON uses ordered maps so key order is stable; CSV always writes a header
// row with '.' decimals regardless of locale.

namespace varsel::io {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return {buf, ptr};
}

// ---- function spec ---------------------------------------------------------
// {"d": 3, "coefficients": [{"k": [1,0,0], "type": "cos", "value": 0.5}, ...]}
// Stored k is sign-canonical (first nonzero entry positive); the type picks
// the branch. "const" requires the zero index.

inline Json to_json(const SparseFourierFunction& f) {
    Json out;
    out["d"] = f.dim;
    out["coefficients"] = Json::array();
    for (const auto& [k, v] : f.coefficients) {
        Json c;
        const bool zero = k.is_zero();
        const MultiIndex canon = (zero || k.sign_canonical()) ? k : k.negated();
        c["k"] = canon.entries;
        c["type"] = zero ? "const" : (k.sign_canonical() ? "cos" : "sin");
        c["value"] = v;
        out["coefficients"].push_back(std::move(c));
    }
    return out;
}

inline SparseFourierFunction function_from_json(const Json& j) {
    if (!j.contains("d") || !j["d"].is_number_integer())
        throw ValidationError("function json: missing integer field 'd'");
    const int d = j["d"].get<int>();
    require(d >= 1, "function json: d must be >= 1");
    SparseFourierFunction f(d);
    for (const auto& c : j.value("coefficients", Json::array())) {
        if (!c.contains("k") || !c.contains("type") || !c.contains("value"))
            throw ValidationError("function json: coefficient needs k, type, value");
        auto entries = c["k"].get<std::vector<std::int32_t>>();
        if (static_cast<int>(entries.size()) != d)
            throw ValidationError("function json: index length must equal d");
        MultiIndex k(std::move(entries));
        const std::string type = c["type"].get<std::string>();
        const double value = c["value"].get<double>();
        if (value == 0.0) throw ValidationError("function json: zero coefficients may not be stored");
        if (type == "const") {
            if (!k.is_zero()) throw ValidationError("function json: const requires the zero index");
        } else if (type == "cos" || type == "sin") {
            if (!k.sign_canonical())
                throw ValidationError(
                    "function json: index must be canonical (first nonzero entry positive)");
            if (type == "sin") k = k.negated();
        } else {
            throw ValidationError("function json: type must be const, cos or sin");
        }
        if (f.coefficients.count(k)) throw ValidationError("function json: duplicate coefficient");
        f.set(k, value);
    }
    return f;
}

// ---- white-noise sample ----------------------------------------------------
// {"d": 12, "n": 100, "observations": [{"k": [...], "y": 0.1}, ...]}
// Observation indices are full-signed basis indices.

inline Json to_json(const WhiteNoiseSample& s) {
    Json out;
    out["d"] = s.d;
    out["n"] = s.n;
    out["observations"] = Json::array();
    for (const auto& [k, y] : s.observations) {
        Json o;
        o["k"] = k.entries;
        o["y"] = y;
        out["observations"].push_back(std::move(o));
    }
    return out;
}

inline WhiteNoiseSample sample_from_json(const Json& j) {
    WhiteNoiseSample s;
    if (!j.contains("d") || !j.contains("n"))
        throw ValidationError("sample json: missing 'd' or 'n'");
    s.d = j["d"].get<int>();
    s.n = j["n"].get<long>();
    require(s.d >= 1 && s.n >= 1, "sample json: d and n must be >= 1");
    for (const auto& o : j.value("observations", Json::array())) {
        auto entries = o.at("k").get<std::vector<std::int32_t>>();
        if (static_cast<int>(entries.size()) != s.d)
            throw ValidationError("sample json: index length must equal d");
        s.observations.emplace(MultiIndex(std::move(entries)), o.at("y").get<double>());
    }
    return s;
}

// ---- selection result ------------------------------------------------------

inline Json to_json(const SelectionResult& r) {
    Json out;
    out["selected"] = r.selected;
    out["statistics"] = r.statistic;
    out["witnesses"] = Json::array();
    for (const auto& [j, w] : r.witness) {
        Json wj;
        wj["variable"] = j;
        wj["level"] = w.level;
        wj["subset"] = w.subset;
        out["witnesses"].push_back(std::move(wj));
    }
    return out;
}

// ---- saddle data -----------------------------------------------------------

inline Json to_json(const saddle::SaddleData& s) {
    Json out;
    out["gamma"] = s.gamma;
    out["y"] = s.y;
    out["z"] = s.z;
    out["rate"] = s.rate;
    out["curvature"] = s.curvature;
    out["log_prefactor"] = s.log_prefactor;
    out["residual"] = s.residual;
    return out;
}

// ---- monte carlo -----------------------------------------------------------

inline Json to_json(const mc::WilsonInterval& w) { return Json::array({w.lo, w.hi}); }

inline Json to_json(const mc::MonteCarloReport& r, bool with_log = false) {
    Json out;
    out["trials"] = r.rates.trials;
    out["true_support"] = r.true_support;
    out["type1"] = r.rates.type1;
    out["type1_ci"] = to_json(r.rates.type1_ci);
    out["type2"] = r.rates.type2;
    out["type2_ci"] = to_json(r.rates.type2_ci);
    out["exact"] = r.rates.exact;
    out["exact_ci"] = to_json(r.rates.exact_ci);
    out["theory_type1_bound"] = r.bounds.theory_type1_bound;
    out["theory_exact_bound"] = r.bounds.theory_exact_bound;
    if (r.bounds.type1_pass) out["type1_pass"] = *r.bounds.type1_pass;
    if (r.bounds.exact_pass) out["exact_pass"] = *r.bounds.exact_pass;
    if (with_log) {
        out["log"] = Json::array();
        for (const auto& t : r.log) {
            Json tj;
            tj["trial"] = t.trial;
            tj["selected"] = t.selected;
            tj["type1"] = t.type1;
            tj["type2"] = t.type2;
            tj["exact"] = t.exact;
            out["log"].push_back(std::move(tj));
        }
    }
    return out;
}

inline mc::ExperimentConfig config_from_json(const Json& j) {
    mc::ExperimentConfig cfg;
    const std::string model = j.value("model", "gwn");
    if (model == "gwn")
        cfg.model = mc::ExperimentConfig::Model::kGwn;
    else if (model == "regression")
        cfg.model = mc::ExperimentConfig::Model::kRegression;
    else
        throw ValidationError("config json: model must be gwn or regression");

    cfg.n = j.value("n", 100L);
    cfg.d = j.value("d", 2);
    cfg.dstar = j.value("dstar", 1);
    cfg.trials = j.value("trials", 1L);
    cfg.seed = j.value("seed", 0ULL);
    cfg.jobs = j.value("jobs", 0);
    if (j.contains("type1_tolerance")) cfg.type1_tolerance = j["type1_tolerance"].get<double>();
    if (j.contains("exact_min")) cfg.exact_min = j["exact_min"].get<double>();

    if (j.contains("instance")) {
        const auto& inst = j["instance"];
        const std::string kind = inst.value("type", "null");
        if (kind == "null") {
            cfg.instance.kind = mc::InstanceSpec::Kind::kNull;
        } else if (kind == "single-frequency") {
            cfg.instance.kind = mc::InstanceSpec::Kind::kSingleFrequency;
            cfg.instance.support = inst.at("support").get<std::vector<int>>();
            cfg.instance.amplitude = inst.at("amplitude").get<double>();
        } else if (kind == "ball-signs") {
            cfg.instance.kind = mc::InstanceSpec::Kind::kBallSigns;
            cfg.instance.support = inst.at("support").get<std::vector<int>>();
            cfg.instance.gamma = inst.value("gamma", 1);
            cfg.instance.amplitude = inst.value("amplitude", 0.0);
            cfg.instance.sign_seed = inst.value("sign_seed", 0ULL);
        } else if (kind == "function") {
            cfg.instance.kind = mc::InstanceSpec::Kind::kExplicit;
            cfg.instance.function = function_from_json(inst.at("spec"));
        } else {
            throw ValidationError("config json: unknown instance type");
        }
    }

    if (j.contains("gwn")) {
        const auto& g = j["gwn"];
        cfg.gwn.A = g.value("A", 2.0);
        cfg.gwn.vartheta = g.value("vartheta", 2.0);
        const std::string variant = g.value("variant", "full");
        if (variant == "full")
            cfg.gwn.variant = SelectVariant::kFull;
        else if (variant == "simple")
            cfg.gwn.variant = SelectVariant::kSimple;
        else
            throw ValidationError("config json: gwn variant must be full or simple");
        if (g.contains("grid")) cfg.gwn.adaptive_grid = g["grid"].get<std::vector<double>>();
    }
    if (j.contains("regression")) {
        const auto& r = j["regression"];
        cfg.regression.sigma = r.value("sigma", 1.0);
        cfg.regression.vartheta = r.value("vartheta", 2.0);
        cfg.regression.L2 = r.value("L2", 1.0);
        cfg.regression.g_min = r.value("g_min", 1.0);
        const std::string strat = r.value("strategy", "stepwise");
        if (strat == "stepwise")
            cfg.regression.strategy = RegressionStrategy::kStepwise;
        else if (strat == "exhaustive")
            cfg.regression.strategy = RegressionStrategy::kExhaustive;
        else
            throw ValidationError("config json: strategy must be stepwise or exhaustive");
        if (r.contains("m")) cfg.regression.m_override = r["m"].get<double>();
        if (r.contains("lambda")) cfg.regression.lambda_override = r["lambda"].get<double>();
    }
    return cfg;
}

// ---- CSV -------------------------------------------------------------------

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) {
        write_strings(header);
    }

    void row(const std::vector<double>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += format_double(values[i]);
        }
        out_ << line << '\n';
    }

    void write_strings(const std::vector<std::string>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += values[i];
        }
        out_ << line << '\n';
    }

  private:
    std::ostream& out_;
};

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad json in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace varsel::io
