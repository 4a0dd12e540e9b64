#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aerostack/ensemble.hpp"
#include "aerostack/error.hpp"
#include "aerostack/features.hpp"
#include "aerostack/metrics.hpp"
#include "aerostack/time.hpp"

namespace aerostack {

struct BacktestConfig {
    int horizon_hours = 24;
    int step_days = 1;
    double test_fraction = 0.10;
    std::vector<std::string> models{"rf", "gbt", "svr", "deml"};

    void validate() const {
        if (horizon_hours < 1) fail(ErrorKind::InvalidConfig, "backtest.horizon_hours must be >= 1");
        if (step_days < 1) fail(ErrorKind::InvalidConfig, "backtest.step_days must be >= 1");
        if (horizon_hours != 24 * step_days) {
            fail(ErrorKind::InvalidConfig, "backtest.horizon_hours must equal 24 * step_days so windows tile the test set");
        }
        if (!(test_fraction > 0 && test_fraction < 1)) {
            fail(ErrorKind::InvalidConfig, "backtest.test_fraction must lie in (0, 1)");
        }
        if (models.empty()) fail(ErrorKind::InvalidConfig, "backtest.models must not be empty");
        std::set<std::string> seen;
        for (const auto& m : models) {
            if (m != "rf" && m != "gbt" && m != "svr" && m != "deml") {
                fail(ErrorKind::InvalidConfig, "backtest.models: unknown model '" + m + "'");
            }
            if (!seen.insert(m).second) fail(ErrorKind::InvalidConfig, "backtest.models: duplicate '" + m + "'");
        }
    }
};

struct WindowResult {
    Instant start;
    std::vector<Instant> timestamps;
    std::vector<double> pred;
    std::vector<double> obs;
};

struct ModelBacktest {
    std::string model;
    std::vector<WindowResult> windows;
    double rmse = 0;
    double r2 = std::numeric_limits<double>::quiet_NaN();  // NaN when test observations are constant

    std::vector<double> pooled_pred() const {
        std::vector<double> v;
        for (const auto& w : windows) v.insert(v.end(), w.pred.begin(), w.pred.end());
        return v;
    }
    std::vector<double> pooled_obs() const {
        std::vector<double> v;
        for (const auto& w : windows) v.insert(v.end(), w.obs.begin(), w.obs.end());
        return v;
    }
};

struct WindowAudit {
    Instant start;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> predict_rows;
};

struct BacktestAudit {
    std::vector<WindowAudit> windows;
    std::vector<OofAudit> oof;
};

struct BacktestReport {
    std::vector<ModelBacktest> models;
    std::size_t test_rows = 0;
    std::size_t test_days = 0;
    BacktestAudit audit;

    const ModelBacktest* find(const std::string& name) const {
        for (const auto& m : models) {
            if (m.model == name) return &m;
        }
        return nullptr;
    }
};

struct TestSplit {
    std::size_t first_test_row = 0;
    std::size_t distinct_days = 0;
    std::size_t test_days = 0;
};

/// Test set = the last ceil(fraction * distinct UTC days) days of the data.
inline TestSplit split_test(const FeatureMatrix& data, double test_fraction) {
    std::vector<std::chrono::sys_days> days;
    for (auto t : data.timestamps) {
        const auto d = utc_day(t);
        if (days.empty() || days.back() != d) days.push_back(d);
    }
    TestSplit split;
    split.distinct_days = days.size();
    if (days.empty()) fail(ErrorKind::EmptyTest, "no rows to split");
    // guard against 0.1 * 20 landing a hair above 2
    const double raw = test_fraction * static_cast<double>(days.size());
    split.test_days = std::min(days.size(), static_cast<std::size_t>(std::ceil(raw - 1e-9)));
    if (split.test_days == 0) fail(ErrorKind::EmptyTest, "test fraction selects no days");
    const auto first_test_day = days[days.size() - split.test_days];
    while (split.first_test_row < data.rows() && utc_day(data.timestamps[split.first_test_row]) < first_test_day) {
        ++split.first_test_row;
    }
    return split;
}

struct WindowPlan {
    Instant start;
    std::size_t begin;  // first row in window
    std::size_t end;    // one past last row
};

/// Consecutive horizon blocks starting at the first test timestamp. Blocks
/// with no rows are dropped.
inline std::vector<WindowPlan> plan_windows(const FeatureMatrix& data, const BacktestConfig& cfg) {
    cfg.validate();
    const TestSplit split = split_test(data, cfg.test_fraction);
    if (split.first_test_row >= data.rows()) fail(ErrorKind::EmptyTest, "test partition is empty");
    std::vector<WindowPlan> plans;
    const Instant origin = data.timestamps[split.first_test_row];
    const auto step = std::chrono::hours{24 * cfg.step_days};
    const auto horizon = std::chrono::hours{cfg.horizon_hours};
    std::size_t row = split.first_test_row;
    for (Instant start = origin; row < data.rows(); start += step) {
        const Instant stop = start + horizon;
        std::size_t end = row;
        while (end < data.rows() && data.timestamps[end] < stop) ++end;
        if (end > row) plans.push_back({start, row, end});
        row = end;
    }
    return plans;
}

/// Per-window forecaster: fit on `train`, predict every row of `window`,
/// returning one prediction vector per model name (same order as the
/// backtest's model list).
using WindowForecaster = std::function<std::vector<std::vector<double>>(
    const FeatureMatrix& train, const FeatureMatrix& window, BacktestAudit& audit)>;

/// Expanding-window backtest. Window k trains on every row before its start
/// (pre-test rows plus windows 1..k-1) and predicts its own rows; metrics are
/// pooled over the concatenation of all windows.
inline BacktestReport rolling_backtest(const FeatureMatrix& data, const std::vector<std::string>& model_names,
                                       const WindowForecaster& forecaster, const BacktestConfig& cfg) {
    for (std::size_t i = 1; i < data.timestamps.size(); ++i) {
        if (data.timestamps[i] <= data.timestamps[i - 1]) {
            fail(ErrorKind::InvalidArgument, "backtest data must be strictly time-sorted");
        }
    }
    const auto plans = plan_windows(data, cfg);
    BacktestReport report;
    report.test_days = split_test(data, cfg.test_fraction).test_days;
    for (const auto& name : model_names) report.models.push_back(ModelBacktest{name, {}, 0, 0});

    for (const auto& plan : plans) {
        WindowAudit wa;
        wa.start = plan.start;
        for (std::size_t r = 0; r < plan.begin; ++r) wa.train_rows.push_back(r);
        for (std::size_t r = plan.begin; r < plan.end; ++r) wa.predict_rows.push_back(r);
        const FeatureMatrix train = data.slice(0, plan.begin);
        const FeatureMatrix window = data.slice(plan.begin, plan.end);
        const auto preds = forecaster(train, window, report.audit);
        if (preds.size() != model_names.size()) {
            fail(ErrorKind::LengthMismatch, "forecaster returned " + std::to_string(preds.size()) + " models");
        }
        for (std::size_t m = 0; m < preds.size(); ++m) {
            if (preds[m].size() != window.rows()) fail(ErrorKind::LengthMismatch, "forecaster returned wrong row count");
            WindowResult wr;
            wr.start = plan.start;
            wr.timestamps = window.timestamps;
            wr.pred = preds[m];
            wr.obs.assign(window.y.data(), window.y.data() + window.y.size());
            report.models[m].windows.push_back(std::move(wr));
        }
        report.test_rows += window.rows();
        report.audit.windows.push_back(std::move(wa));
    }

    for (auto& m : report.models) {
        const auto pred = m.pooled_pred();
        const auto obs = m.pooled_obs();
        m.rmse = rmse(pred, obs);
        try {
            m.r2 = r_squared(pred, obs);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroVariance && e.kind() != ErrorKind::EmptyInput) throw;
            m.r2 = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return report;
}

/// Checks the window bookkeeping and every out-of-fold pass recorded during
/// a backtest. Throws LeakageDetected on the first violation.
inline void assert_backtest_hygiene(const BacktestReport& report, const FeatureMatrix& data) {
    std::set<std::size_t> predicted;
    for (const auto& w : report.audit.windows) {
        const std::set<std::size_t> trained(w.train_rows.begin(), w.train_rows.end());
        for (std::size_t r : w.predict_rows) {
            if (trained.count(r)) {
                fail(ErrorKind::LeakageDetected, "window " + format_instant(w.start) + " trained on row " +
                                                     std::to_string(r) + " it predicts");
            }
            if (!predicted.insert(r).second) {
                fail(ErrorKind::LeakageDetected, "row " + std::to_string(r) + " predicted by more than one window");
            }
        }
        for (std::size_t r : w.train_rows) {
            if (data.timestamps[r] >= w.start) {
                fail(ErrorKind::LeakageDetected, "window " + format_instant(w.start) + " trained on a row at or after its start");
            }
        }
    }
    for (const auto& oof : report.audit.oof) assert_no_leakage(oof);
}

/// Benchmarks and DEML per window. A benchmark whose spec equals one of the
/// stack's base specs reuses that base fit, which is identical by
/// construction.
inline BacktestReport rolling_backtest(const FeatureMatrix& data, const StackConfig& stack,
                                       const std::vector<RegressorSpec>& benchmarks, const BacktestConfig& cfg) {
    cfg.validate();
    stack.validate();
    std::vector<std::string> names = cfg.models;
    auto benchmark_spec = [&](const std::string& name) -> const RegressorSpec& {
        for (const auto& s : benchmarks) {
            if (s.name() == name) return s;
        }
        fail(ErrorKind::InvalidConfig, "no benchmark spec for '" + name + "'");
    };
    const bool want_deml = std::find(names.begin(), names.end(), "deml") != names.end();

    WindowForecaster forecaster = [&](const FeatureMatrix& train, const FeatureMatrix& window, BacktestAudit& audit) {
        std::vector<std::vector<double>> out;
        std::optional<DemlModel> deml;
        if (want_deml) {
            StackAudit sa;
            deml = fit_deml(stack, train, &sa);
            for (auto& o : sa.oof) audit.oof.push_back(std::move(o));
        }
        for (const auto& name : names) {
            if (name == "deml") {
                out.push_back(deml->predict(window));
                continue;
            }
            const RegressorSpec& spec = benchmark_spec(name);
            const FittedRegressor* reuse = nullptr;
            if (deml) {
                for (std::size_t b = 0; b < stack.base_specs.size(); ++b) {
                    if (stack.base_specs[b] == spec) reuse = &deml->bases[b];
                }
            }
            if (reuse) {
                out.push_back(reuse->predict(window));
            } else {
                out.push_back(spec.fit(train).predict(window));
            }
        }
        return out;
    };
    return rolling_backtest(data, names, forecaster, cfg);
}

}  // namespace aerostack
