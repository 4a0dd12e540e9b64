#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aerostack/backtest.hpp"
#include "aerostack/ensemble.hpp"
#include "aerostack/error.hpp"
#include "aerostack/features.hpp"
#include "aerostack/learners.hpp"
#include "aerostack/thresholds.hpp"

namespace aerostack {

struct ModelParams {
    RfParams rf;
    GbtParams gbt;
    SvrParams svr;
    GlmParams glm;
};

struct StackSettings {
    std::vector<ModelKind> base{ModelKind::rf, ModelKind::gbt, ModelKind::svr};
    std::vector<ModelKind> meta{ModelKind::rf, ModelKind::glm};
    int oof_folds = 5;
    std::uint64_t seed = 42;
};

/// Everything a CLI run can be configured with. Every key is optional.
struct RunConfig {
    FeatureSchema features;
    ModelParams models;
    StackSettings stack;
    BacktestConfig backtest;
    ThresholdTable thresholds = default_thresholds();
};

inline RegressorSpec make_spec(ModelKind kind, const ModelParams& params, std::uint64_t seed) {
    switch (kind) {
        case ModelKind::rf: return RegressorSpec::rf(params.rf, seed);
        case ModelKind::gbt: return RegressorSpec::gbt(params.gbt, seed);
        case ModelKind::svr: return RegressorSpec::svr(params.svr, seed);
        case ModelKind::glm: return RegressorSpec::glm(params.glm, seed);
    }
    fail(ErrorKind::InvalidConfig, "unknown model kind");
}

inline StackConfig make_stack_config(const RunConfig& cfg) {
    StackConfig s;
    s.base_specs.clear();
    s.meta_specs.clear();
    for (auto k : cfg.stack.base) s.base_specs.push_back(make_spec(k, cfg.models, cfg.stack.seed));
    for (auto k : cfg.stack.meta) s.meta_specs.push_back(make_spec(k, cfg.models, cfg.stack.seed));
    s.oof_folds = static_cast<std::size_t>(cfg.stack.oof_folds);
    s.seed = cfg.stack.seed;
    return s;
}

/// Benchmark specs for the non-ensemble entries of backtest.models.
inline std::vector<RegressorSpec> benchmark_specs(const RunConfig& cfg) {
    std::vector<RegressorSpec> out;
    for (const auto& m : cfg.backtest.models) {
        if (auto k = model_kind_from_string(m)) out.push_back(make_spec(*k, cfg.models, cfg.stack.seed));
    }
    return out;
}

namespace config_detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) fail(ErrorKind::InvalidConfig, path + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) fail(ErrorKind::InvalidConfig, "unknown key '" + path + "." + key + "'");
    }
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(ErrorKind::InvalidConfig, path + " must be a number");
    return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(ErrorKind::InvalidConfig, path + " must be an integer");
    return j.get<int>();
}

inline bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(ErrorKind::InvalidConfig, path + " must be true or false");
    return j.get<bool>();
}

inline std::vector<ModelKind> kinds(const json& j, const std::string& path) {
    if (!j.is_array()) fail(ErrorKind::InvalidConfig, path + " must be an array of model names");
    std::vector<ModelKind> out;
    for (const auto& e : j) {
        const auto k = e.is_string() ? model_kind_from_string(e.get<std::string>()) : std::nullopt;
        if (!k) fail(ErrorKind::InvalidConfig, path + ": unknown model '" + e.dump() + "'");
        out.push_back(*k);
    }
    if (out.empty()) fail(ErrorKind::InvalidConfig, path + " must not be empty");
    return out;
}

inline Band band(const json& j, const std::string& path) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "good") return Band::good;
    if (s == "moderate") return Band::moderate;
    if (s == "poor") return Band::poor;
    fail(ErrorKind::InvalidConfig, path + ": band must be good, moderate or poor");
}

inline void parse_features(const json& j, FeatureSchema& f) {
    reject_unknown(j, "features", {"lags", "calendar", "coordinates", "covariates"});
    if (j.contains("lags")) {
        if (!j["lags"].is_array()) fail(ErrorKind::InvalidConfig, "features.lags must be an array");
        f.lags.clear();
        for (const auto& e : j["lags"]) f.lags.push_back(integer(e, "features.lags[]"));
    }
    if (j.contains("calendar")) f.calendar = boolean(j["calendar"], "features.calendar");
    if (j.contains("coordinates")) f.coordinates = boolean(j["coordinates"], "features.coordinates");
    if (j.contains("covariates")) {
        if (!j["covariates"].is_array()) fail(ErrorKind::InvalidConfig, "features.covariates must be an array");
        f.covariates.clear();
        for (const auto& e : j["covariates"]) {
            if (!e.is_string()) fail(ErrorKind::InvalidConfig, "features.covariates[] must be strings");
            f.covariates.push_back(e.get<std::string>());
        }
    }
    try {
        f.validate();
    } catch (const Error& e) {
        fail(ErrorKind::InvalidConfig, std::string("features: ") + e.what());
    }
}

inline void parse_models(const json& j, ModelParams& m) {
    reject_unknown(j, "models", {"rf", "gbt", "svr", "glm"});
    if (j.contains("rf")) {
        const auto& r = j["rf"];
        reject_unknown(r, "models.rf", {"n_trees", "mtry", "min_leaf", "max_depth", "bootstrap"});
        if (r.contains("n_trees")) m.rf.n_trees = integer(r["n_trees"], "models.rf.n_trees");
        if (r.contains("mtry")) m.rf.mtry = r["mtry"].is_null() ? 0 : integer(r["mtry"], "models.rf.mtry");
        if (r.contains("min_leaf")) m.rf.min_leaf = integer(r["min_leaf"], "models.rf.min_leaf");
        if (r.contains("max_depth")) {
            m.rf.max_depth = r["max_depth"].is_null() ? -1 : integer(r["max_depth"], "models.rf.max_depth");
        }
        if (r.contains("bootstrap")) m.rf.bootstrap = boolean(r["bootstrap"], "models.rf.bootstrap");
    }
    if (j.contains("gbt")) {
        const auto& g = j["gbt"];
        reject_unknown(g, "models.gbt", {"n_rounds", "learning_rate", "max_depth", "min_leaf", "l2_leaf"});
        if (g.contains("n_rounds")) m.gbt.n_rounds = integer(g["n_rounds"], "models.gbt.n_rounds");
        if (g.contains("learning_rate")) m.gbt.learning_rate = number(g["learning_rate"], "models.gbt.learning_rate");
        if (g.contains("max_depth")) m.gbt.max_depth = integer(g["max_depth"], "models.gbt.max_depth");
        if (g.contains("min_leaf")) m.gbt.min_leaf = integer(g["min_leaf"], "models.gbt.min_leaf");
        if (g.contains("l2_leaf")) m.gbt.l2_leaf = number(g["l2_leaf"], "models.gbt.l2_leaf");
    }
    if (j.contains("svr")) {
        const auto& s = j["svr"];
        reject_unknown(s, "models.svr", {"c", "epsilon", "max_epochs", "tol"});
        if (s.contains("c")) m.svr.c = number(s["c"], "models.svr.c");
        if (s.contains("epsilon")) m.svr.epsilon = number(s["epsilon"], "models.svr.epsilon");
        if (s.contains("max_epochs")) m.svr.max_epochs = integer(s["max_epochs"], "models.svr.max_epochs");
        if (s.contains("tol")) m.svr.tol = number(s["tol"], "models.svr.tol");
    }
    if (j.contains("glm")) {
        const auto& g = j["glm"];
        reject_unknown(g, "models.glm", {"ridge_lambda"});
        if (g.contains("ridge_lambda")) m.glm.ridge_lambda = number(g["ridge_lambda"], "models.glm.ridge_lambda");
    }

    auto check = [](bool ok, const char* msg) {
        if (!ok) fail(ErrorKind::InvalidConfig, msg);
    };
    check(m.rf.n_trees >= 1, "models.rf.n_trees must be >= 1");
    check(m.rf.mtry >= 0, "models.rf.mtry must be >= 1 (or 0/null for ceil(p/3))");
    check(m.rf.min_leaf >= 1, "models.rf.min_leaf must be >= 1");
    check(m.rf.max_depth >= -1, "models.rf.max_depth must be >= 0 (or -1/null for unlimited)");
    check(m.gbt.n_rounds >= 0, "models.gbt.n_rounds must be >= 0");
    check(m.gbt.learning_rate >= 0, "models.gbt.learning_rate must be >= 0");
    check(m.gbt.max_depth >= 0, "models.gbt.max_depth must be >= 0");
    check(m.gbt.min_leaf >= 1, "models.gbt.min_leaf must be >= 1");
    check(m.gbt.l2_leaf >= 0, "models.gbt.l2_leaf must be >= 0");
    check(m.svr.c > 0, "models.svr.c must be > 0");
    check(m.svr.epsilon >= 0, "models.svr.epsilon must be >= 0");
    check(m.svr.max_epochs >= 1, "models.svr.max_epochs must be >= 1");
    check(m.svr.tol > 0, "models.svr.tol must be > 0");
    check(m.glm.ridge_lambda >= 0, "models.glm.ridge_lambda must be >= 0");
}

inline void parse_stack(const json& j, StackSettings& s) {
    reject_unknown(j, "stack", {"base", "meta", "oof_folds", "seed"});
    if (j.contains("base")) s.base = kinds(j["base"], "stack.base");
    if (j.contains("meta")) s.meta = kinds(j["meta"], "stack.meta");
    if (j.contains("oof_folds")) s.oof_folds = integer(j["oof_folds"], "stack.oof_folds");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
            fail(ErrorKind::InvalidConfig, "stack.seed must be a non-negative integer");
        }
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (s.oof_folds < 2) fail(ErrorKind::InvalidConfig, "stack.oof_folds must be >= 2");
}

inline void parse_backtest(const json& j, BacktestConfig& b) {
    reject_unknown(j, "backtest", {"horizon_hours", "step_days", "test_fraction", "models"});
    if (j.contains("horizon_hours")) b.horizon_hours = integer(j["horizon_hours"], "backtest.horizon_hours");
    if (j.contains("step_days")) b.step_days = integer(j["step_days"], "backtest.step_days");
    if (j.contains("test_fraction")) b.test_fraction = number(j["test_fraction"], "backtest.test_fraction");
    if (j.contains("models")) {
        if (!j["models"].is_array()) fail(ErrorKind::InvalidConfig, "backtest.models must be an array");
        b.models.clear();
        for (const auto& e : j["models"]) {
            if (!e.is_string()) fail(ErrorKind::InvalidConfig, "backtest.models[] must be strings");
            b.models.push_back(e.get<std::string>());
        }
    }
    b.validate();
}

inline void parse_thresholds(const json& j, ThresholdTable& table) {
    if (!j.is_object()) fail(ErrorKind::InvalidConfig, "thresholds must be an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto p : kBandedParameters) known = known || p == key;
        if (!known) fail(ErrorKind::InvalidConfig, "unknown key 'thresholds." + key + "'");
        const std::string path = "thresholds." + key;
        ThresholdBands bands;
        const json* breaks = &value;
        if (value.is_object()) {
            reject_unknown(value, path, {"breakpoints", "bands"});
            if (!value.contains("breakpoints")) fail(ErrorKind::InvalidConfig, path + ".breakpoints is required");
            breaks = &value["breakpoints"];
        }
        if (!breaks->is_array()) fail(ErrorKind::InvalidConfig, path + " breakpoints must be an array of numbers");
        for (const auto& e : *breaks) bands.breakpoints.push_back(number(e, path + ".breakpoints[]"));
        if (value.is_object() && value.contains("bands")) {
            if (!value["bands"].is_array()) fail(ErrorKind::InvalidConfig, path + ".bands must be an array");
            for (const auto& e : value["bands"]) bands.bands.push_back(band(e, path + ".bands[]"));
        } else if (bands.breakpoints.size() == 2) {
            bands.bands = {Band::good, Band::moderate, Band::poor};
        } else {
            fail(ErrorKind::InvalidConfig, path + ": a plain breakpoint list must have exactly 2 entries");
        }
        bands.validate(key);
        table[key] = std::move(bands);
    }
}

}  // namespace config_detail

/// Parses and validates a run configuration. Unknown keys anywhere are
/// rejected; omitted keys keep their defaults.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    using namespace config_detail;
    RunConfig cfg;
    if (j.is_null()) return cfg;
    reject_unknown(j, "config", {"features", "models", "stack", "backtest", "thresholds"});
    if (j.contains("features")) parse_features(j["features"], cfg.features);
    if (j.contains("models")) parse_models(j["models"], cfg.models);
    if (j.contains("stack")) parse_stack(j["stack"], cfg.stack);
    if (j.contains("backtest")) parse_backtest(j["backtest"], cfg.backtest);
    if (j.contains("thresholds")) parse_thresholds(j["thresholds"], cfg.thresholds);
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::MissingFile, "cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::InvalidConfig, "config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

inline nlohmann::json to_json(const RunConfig& cfg) {
    using nlohmann::json;
    auto kind_list = [](const std::vector<ModelKind>& ks) {
        json a = json::array();
        for (auto k : ks) a.push_back(std::string(to_string(k)));
        return a;
    };
    json thresholds = json::object();
    for (const auto& [name, b] : cfg.thresholds) {
        json bands = json::array();
        for (auto band : b.bands) bands.push_back(std::string(to_string(band)));
        thresholds[name] = {{"breakpoints", b.breakpoints}, {"bands", bands}};
    }
    const auto& m = cfg.models;
    return json{
        {"features",
         {{"lags", cfg.features.lags},
          {"calendar", cfg.features.calendar},
          {"coordinates", cfg.features.coordinates},
          {"covariates", cfg.features.covariates}}},
        {"models",
         {{"rf",
           {{"n_trees", m.rf.n_trees},
            {"mtry", m.rf.mtry},
            {"min_leaf", m.rf.min_leaf},
            {"max_depth", m.rf.max_depth},
            {"bootstrap", m.rf.bootstrap}}},
          {"gbt",
           {{"n_rounds", m.gbt.n_rounds},
            {"learning_rate", m.gbt.learning_rate},
            {"max_depth", m.gbt.max_depth},
            {"min_leaf", m.gbt.min_leaf},
            {"l2_leaf", m.gbt.l2_leaf}}},
          {"svr", {{"c", m.svr.c}, {"epsilon", m.svr.epsilon}, {"max_epochs", m.svr.max_epochs}, {"tol", m.svr.tol}}},
          {"glm", {{"ridge_lambda", m.glm.ridge_lambda}}}}},
        {"stack",
         {{"base", kind_list(cfg.stack.base)},
          {"meta", kind_list(cfg.stack.meta)},
          {"oof_folds", cfg.stack.oof_folds},
          {"seed", cfg.stack.seed}}},
        {"backtest",
         {{"horizon_hours", cfg.backtest.horizon_hours},
          {"step_days", cfg.backtest.step_days},
          {"test_fraction", cfg.backtest.test_fraction},
          {"models", cfg.backtest.models}}},
        {"thresholds", thresholds},
    };
}

}  // namespace aerostack
