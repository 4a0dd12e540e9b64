#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aerostack/backtest.hpp"
#include "aerostack/config.hpp"
#include "aerostack/data_model.hpp"
#include "aerostack/ensemble.hpp"
#include "aerostack/features.hpp"
#include "aerostack/importance.hpp"
#include "aerostack/loess.hpp"
#include "aerostack/metrics.hpp"
#include "aerostack/report.hpp"
#include "aerostack/synth.hpp"
#include "aerostack/thresholds.hpp"

namespace aerostack {

struct CommandContext {
    RunConfig config;
    std::ostream* diag = &std::cerr;

    std::ostream& warn() const { return *diag << "warning: "; }
};

// ---------------------------------------------------------------------------
// Shared loading

inline std::vector<SensorReading> load_indoor(const std::filesystem::path& path) {
    auto rows = parse_indoor_csv(path);
    if (rows.empty()) fail(ErrorKind::EmptyInput, "'" + path.string() + "' has no data rows");
    return rows;
}

inline std::vector<OutdoorObservation> load_outdoor(const std::filesystem::path& path) {
    auto rows = parse_outdoor_csv(path);
    if (rows.empty()) fail(ErrorKind::EmptyInput, "'" + path.string() + "' has no data rows");
    return rows;
}

/// Buildings in first-appearance order with their readings.
inline std::vector<std::pair<std::string, std::vector<SensorReading>>> group_by_building(
    const std::vector<SensorReading>& readings) {
    std::vector<std::pair<std::string, std::vector<SensorReading>>> out;
    std::map<std::string, std::size_t> index;
    for (const auto& r : readings) {
        auto [it, inserted] = index.try_emplace(r.building_id, out.size());
        if (inserted) out.emplace_back(r.building_id, std::vector<SensorReading>{});
        out[it->second].second.push_back(r);
    }
    return out;
}

/// Per-hour mean across sensors of each sensor's hourly mean, for every
/// indoor field. Hours are sorted.
inline std::vector<HourlyRecord> building_hourly_means(const std::vector<SensorReading>& readings) {
    struct Acc {
        std::array<double, kFieldCount> sum{};
        std::array<std::size_t, kFieldCount> count{};
    };
    std::map<Instant, Acc> hours;
    for (const auto& group : group_by_sensor(readings)) {
        for (const auto& rec : hourly_aggregate(group)) {
            auto& acc = hours[rec.timestamp];
            for (std::size_t f = 0; f < kFieldCount; ++f) {
                if (rec.values[f]) acc.sum[f] += *rec.values[f], ++acc.count[f];
            }
        }
    }
    std::vector<HourlyRecord> out;
    out.reserve(hours.size());
    for (const auto& [t, acc] : hours) {
        HourlyRecord rec;
        rec.timestamp = t;
        rec.sensor_id = "*";
        rec.building_id = readings.front().building_id;
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            if (acc.count[f]) rec.values[f] = acc.sum[f] / static_cast<double>(acc.count[f]);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline bool schema_uses_outdoor(const FeatureSchema& schema) {
    return std::any_of(schema.covariates.begin(), schema.covariates.end(), [](const std::string& c) {
        return static_cast<std::size_t>(*field_from_name(c)) >= kFirstOutdoorField;
    });
}

struct SensorMatrix {
    std::string sensor_id;
    std::string building_id;
    FeatureMatrix data;
};

inline std::vector<SensorMatrix> sensor_matrices(const std::vector<SensorReading>& indoor,
                                                 const std::vector<OutdoorObservation>* outdoor,
                                                 const FeatureSchema& schema) {
    if (!outdoor && schema_uses_outdoor(schema)) {
        fail(ErrorKind::InvalidConfig, "features.covariates include outdoor fields but no outdoor file was given");
    }
    std::vector<SensorMatrix> out;
    for (const auto& group : group_by_sensor(indoor)) {
        auto hourly = hourly_aggregate(group);
        if (outdoor) hourly = join_hourly(hourly, *outdoor);
        out.push_back({group.front().sensor_id, group.front().building_id, build_feature_matrix(hourly, schema)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// stats

struct StatsOptions {
    std::filesystem::path indoor;
    std::filesystem::path out = "-";
};

inline constexpr std::string_view kStatsHeader =
    "building_id,start_time,end_time,sensors,study_days,study_hours,min,max,median,iqr,mean,sd";

/// One row per building: span, sensor count, study days (inclusive calendar
/// span), study hours (sensor-hours with PM2.5), and the distribution of
/// hourly PM2.5 over all sensor-hours.
inline std::string stats_table(const std::vector<SensorReading>& readings) {
    std::ostringstream os;
    os << kStatsHeader << '\n';
    for (const auto& [building, rows] : group_by_building(readings)) {
        std::vector<double> hourly_pm25;
        std::optional<Instant> first, last;
        const auto groups = group_by_sensor(rows);
        for (const auto& group : groups) {
            for (const auto& rec : hourly_aggregate(group)) {
                if (!rec[Field::pm25]) continue;
                hourly_pm25.push_back(*rec[Field::pm25]);
                if (!first || rec.timestamp < *first) first = rec.timestamp;
                if (!last || rec.timestamp > *last) last = rec.timestamp;
            }
        }
        if (hourly_pm25.empty()) {
            fail(ErrorKind::EmptyInput, "building '" + building + "' has no PM2.5 values");
        }
        const auto s = summary_stats(std::span<const double>(hourly_pm25));
        const auto days = (utc_day(*last) - utc_day(*first)).count() + 1;
        os << csv_field(building) << ',' << format_date(*first) << ',' << format_date(*last) << ',' << groups.size()
           << ',' << days << ',' << hourly_pm25.size() << ',' << fixed(s.min, 2) << ',' << fixed(s.max, 2) << ','
           << fixed(s.median, 2) << ',' << fixed(s.iqr, 2) << ',' << fixed(s.mean, 2) << ',' << fixed(s.sd, 2)
           << '\n';
    }
    return os.str();
}

inline void cmd_stats(const StatsOptions& opt, const CommandContext&) {
    write_atomic(opt.out, stats_table(load_indoor(opt.indoor)));
}

// ---------------------------------------------------------------------------
// backtest

struct BacktestOptions {
    std::filesystem::path indoor;
    std::optional<std::filesystem::path> outdoor;
    std::filesystem::path out = "-";
    std::optional<std::filesystem::path> csv;  // default: out with .csv extension
};

struct BacktestRun {
    std::string sensor_id;
    std::string building_id;
    BacktestReport report;
};

inline std::vector<BacktestRun> run_backtests(const std::vector<SensorReading>& indoor,
                                              const std::vector<OutdoorObservation>* outdoor,
                                              const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const StackConfig stack = make_stack_config(cfg);
    const auto benchmarks = benchmark_specs(cfg);
    std::vector<BacktestRun> runs;
    std::optional<Error> last_skip;
    for (const auto& sm : sensor_matrices(indoor, outdoor, cfg.features)) {
        try {
            auto report = rolling_backtest(sm.data, stack, benchmarks, cfg.backtest);
            assert_backtest_hygiene(report, sm.data);
            runs.push_back({sm.sensor_id, sm.building_id, std::move(report)});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TooFewRows && e.kind() != ErrorKind::EmptyTest) throw;
            ctx.warn() << "sensor " << sm.sensor_id << " skipped: " << e.what() << '\n';
            last_skip = e;
        }
    }
    if (runs.empty()) {
        if (last_skip) throw *last_skip;
        fail(ErrorKind::TooFewRows, "no sensor had enough rows to backtest");
    }
    return runs;
}

inline nlohmann::json backtest_json(const std::vector<BacktestRun>& runs) {
    using nlohmann::json;
    json jruns = json::array();
    for (const auto& run : runs) {
        json models = json::array();
        for (const auto& m : run.report.models) {
            json windows = json::array();
            for (const auto& w : m.windows) {
                windows.push_back({{"start", format_instant(w.start)}, {"pred", w.pred}, {"obs", w.obs}});
            }
            models.push_back({{"model", m.model},
                              {"windows", windows},
                              {"rmse", m.rmse},
                              {"r2", std::isfinite(m.r2) ? json(m.r2) : json(nullptr)}});
        }
        jruns.push_back({{"sensor_id", run.sensor_id},
                         {"building_id", run.building_id},
                         {"test_hours", run.report.test_rows},
                         {"test_days", run.report.test_days},
                         {"models", models}});
    }
    return json{{"runs", jruns}};
}

/// True when deml is present and its RMSE is strictly below every other
/// model's.
inline bool deml_strictly_best(const BacktestReport& report) {
    const auto* deml = report.find("deml");
    if (!deml) return false;
    bool any_other = false;
    for (const auto& m : report.models) {
        if (m.model == "deml") continue;
        any_other = true;
        if (!(deml->rmse < m.rmse)) return false;
    }
    return any_other;
}

inline std::string backtest_table(const std::vector<BacktestRun>& runs, const std::vector<std::string>& models) {
    std::ostringstream os;
    os << "building_id,sensor_id,test_hours";
    for (const auto& m : models) os << ',' << m << "_r2," << m << "_rmse";
    const bool marker = std::find(models.begin(), models.end(), "deml") != models.end();
    if (marker) os << ",deml_best";
    os << '\n';
    for (const auto& run : runs) {
        os << csv_field(run.building_id) << ',' << csv_field(run.sensor_id) << ',' << run.report.test_rows;
        for (const auto& name : models) {
            const auto* m = run.report.find(name);
            os << ',' << fixed(m->r2, 3) << ',' << fixed(m->rmse, 3);
        }
        if (marker) os << ',' << (deml_strictly_best(run.report) ? "*" : "");
        os << '\n';
    }
    return os.str();
}

inline void cmd_backtest(const BacktestOptions& opt, const CommandContext& ctx) {
    const auto indoor = load_indoor(opt.indoor);
    std::optional<std::vector<OutdoorObservation>> outdoor;
    if (opt.outdoor) outdoor = load_outdoor(*opt.outdoor);
    const auto runs = run_backtests(indoor, outdoor ? &*outdoor : nullptr, ctx);
    write_atomic(opt.out, backtest_json(runs).dump(2) + "\n");
    std::optional<std::filesystem::path> csv = opt.csv;
    if (!csv && opt.out != "-") csv = std::filesystem::path(opt.out).replace_extension(".csv");
    if (csv) write_atomic(*csv, backtest_table(runs, ctx.config.backtest.models));
}

// ---------------------------------------------------------------------------
// correlate

struct CorrelateOptions {
    std::filesystem::path indoor;
    std::filesystem::path outdoor;
    std::filesystem::path out = "-";
    std::optional<std::filesystem::path> svg;
};

struct CorrelationRow {
    std::string building_id;
    std::vector<Instant> hours;
    std::vector<double> indoor;
    std::vector<double> outdoor;
    double indoor_mean = 0, indoor_sd = 0, outdoor_mean = 0, outdoor_sd = 0, r = 0;
};

/// Building-hourly indoor mean against outdoor PM2.5 at the same hour.
/// Buildings without at least two matched hours are dropped with a warning.
inline std::vector<CorrelationRow> correlate(const std::vector<SensorReading>& indoor,
                                             const std::vector<OutdoorObservation>& outdoor,
                                             const CommandContext& ctx) {
    std::vector<CorrelationRow> rows;
    for (const auto& [building, readings] : group_by_building(indoor)) {
        const auto joined = join_hourly(building_hourly_means(readings), outdoor);
        CorrelationRow row;
        row.building_id = building;
        for (const auto& rec : joined) {
            if (!rec[Field::pm25] || !rec[Field::pm25_out]) continue;
            row.hours.push_back(rec.timestamp);
            row.indoor.push_back(*rec[Field::pm25]);
            row.outdoor.push_back(*rec[Field::pm25_out]);
        }
        if (row.hours.size() < 2) {
            ctx.warn() << "building " << building << " has " << row.hours.size()
                       << " matched indoor/outdoor hours; omitted\n";
            continue;
        }
        const auto si = summary_stats(std::span<const double>(row.indoor));
        const auto so = summary_stats(std::span<const double>(row.outdoor));
        row.indoor_mean = si.mean;
        row.indoor_sd = si.sd;
        row.outdoor_mean = so.mean;
        row.outdoor_sd = so.sd;
        row.r = spearman(row.indoor, row.outdoor);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string correlation_table(const std::vector<CorrelationRow>& rows) {
    std::ostringstream os;
    os << "building_id,start_time,end_time,matched_hours,indoor_mean,indoor_sd,outdoor_mean,outdoor_sd,r\n";
    for (const auto& row : rows) {
        os << csv_field(row.building_id) << ',' << format_date(row.hours.front()) << ','
           << format_date(row.hours.back()) << ',' << row.hours.size() << ',' << fixed(row.indoor_mean, 2) << ','
           << fixed(row.indoor_sd, 2) << ',' << fixed(row.outdoor_mean, 2) << ',' << fixed(row.outdoor_sd, 2) << ','
           << fixed(row.r, 2) << '\n';
    }
    return os.str();
}

/// Hours since the first timestamp.
inline std::vector<double> hours_since_start(const std::vector<Instant>& t) {
    std::vector<double> x;
    x.reserve(t.size());
    for (auto v : t) x.push_back(std::chrono::duration<double, std::ratio<3600>>(v - t.front()).count());
    return x;
}

inline std::string correlation_svg(const std::vector<CorrelationRow>& rows) {
    const int w = 800, h = 360;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h * rows.size() << "\">\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto x = hours_since_start(row.hours);
        const std::vector<ChartSeries> series = {
            {"indoor", x, row.indoor, "#1f77b4", true},
            {"outdoor", x, row.outdoor, "#d62728", true},
            {"indoor LOESS", x, loess_smooth(x, row.indoor, 0.2), "#1f77b4", false},
            {"outdoor LOESS", x, loess_smooth(x, row.outdoor, 0.2), "#d62728", false},
        };
        os << "<g transform=\"translate(0," << h * i << ")\">\n"
           << svg_line_chart(series, "Building " + row.building_id + " (from " + format_date(row.hours.front()) + ")",
                             "hours since start", "PM2.5 (ug/m3)", w, h)
           << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void cmd_correlate(const CorrelateOptions& opt, const CommandContext& ctx) {
    const auto rows = correlate(load_indoor(opt.indoor), load_outdoor(opt.outdoor), ctx);
    write_atomic(opt.out, correlation_table(rows));
    if (opt.svg) write_atomic(*opt.svg, correlation_svg(rows));
}

// ---------------------------------------------------------------------------
// importance

struct ImportanceOptions {
    std::filesystem::path indoor;
    std::optional<std::filesystem::path> outdoor;
    std::string model = "rf";  // rf, gbt, svr, glm or deml
    std::optional<std::string> sensor;
    int n_perm = 10;
    bool on_test = true;
    bool inject_target_copy = false;
    std::size_t top = 15;
    std::filesystem::path out = "-";
    std::optional<std::filesystem::path> svg;
};

inline constexpr std::string_view kTargetCopyFeature = "target_copy";

/// Fits `opt.model` on the pre-test rows of one sensor and ranks features
/// by permutation loss on the test rows (or the training rows).
inline std::vector<ImportanceEntry> importance_for(const std::vector<SensorReading>& indoor,
                                                   const std::vector<OutdoorObservation>* outdoor,
                                                   const ImportanceOptions& opt, const CommandContext& ctx) {
    const auto kind = model_kind_from_string(opt.model);
    if (!kind && opt.model != "deml") {
        fail(ErrorKind::InvalidArgument, "unknown model kind '" + opt.model + "' (rf, gbt, svr, glm, deml)");
    }
    if (opt.n_perm < 1) fail(ErrorKind::InvalidArgument, "--n-perm must be >= 1");
    const auto matrices = sensor_matrices(indoor, outdoor, ctx.config.features);
    const SensorMatrix* chosen = nullptr;
    for (const auto& m : matrices) {
        if (!opt.sensor || m.sensor_id == *opt.sensor) {
            chosen = &m;
            break;
        }
    }
    if (!chosen) fail(ErrorKind::InvalidArgument, "sensor '" + opt.sensor.value_or("") + "' not found");
    if (!opt.sensor && matrices.size() > 1) {
        ctx.warn() << "several sensors present; using " << chosen->sensor_id << " (pick one with --sensor)\n";
    }

    FeatureMatrix data = chosen->data;
    if (opt.inject_target_copy) data = data.with_column(std::string(kTargetCopyFeature), data.y);
    const auto split = split_test(data, ctx.config.backtest.test_fraction);
    const FeatureMatrix train = data.slice(0, split.first_test_row);
    const FeatureMatrix eval = opt.on_test ? data.slice(split.first_test_row, data.rows()) : train;
    if (train.rows() < 2) fail(ErrorKind::TooFewRows, "too few training rows before the test period");
    if (eval.empty()) fail(ErrorKind::EmptyTest, "evaluation rows are empty");

    const std::uint64_t seed = ctx.config.stack.seed;
    if (kind) {
        const auto model = make_spec(*kind, ctx.config.models, seed).fit(train);
        return permutation_importance(model, eval, opt.n_perm, seed);
    }
    const auto model = fit_deml(make_stack_config(ctx.config), train);
    return permutation_importance(model, eval, opt.n_perm, seed);
}

inline std::string importance_table(const std::vector<ImportanceEntry>& entries, std::size_t top) {
    std::ostringstream os;
    os << "rank,feature,mean_rmse_loss,sd_rmse_loss\n";
    for (std::size_t i = 0; i < std::min(top, entries.size()); ++i) {
        const auto& e = entries[i];
        os << e.rank << ',' << csv_field(e.feature) << ',' << csv::format_number(e.mean_rmse_loss) << ','
           << csv::format_number(e.sd_rmse_loss) << '\n';
    }
    return os.str();
}

inline void cmd_importance(const ImportanceOptions& opt, const CommandContext& ctx) {
    if (!model_kind_from_string(opt.model) && opt.model != "deml") {
        fail(ErrorKind::InvalidArgument, "unknown model kind '" + opt.model + "' (rf, gbt, svr, glm, deml)");
    }
    const auto indoor = load_indoor(opt.indoor);
    std::optional<std::vector<OutdoorObservation>> outdoor;
    if (opt.outdoor) outdoor = load_outdoor(*opt.outdoor);
    const auto entries = importance_for(indoor, outdoor ? &*outdoor : nullptr, opt, ctx);
    write_atomic(opt.out, importance_table(entries, opt.top));
    if (opt.svg) {
        std::vector<std::string> labels;
        std::vector<double> values, errors;
        for (std::size_t i = 0; i < std::min(opt.top, entries.size()); ++i) {
            labels.push_back(entries[i].feature);
            values.push_back(entries[i].mean_rmse_loss);
            errors.push_back(entries[i].sd_rmse_loss);
        }
        write_atomic(*opt.svg, svg_bar_chart(labels, values, errors, "Permutation importance (" + opt.model + ")",
                                             "mean RMSE loss"));
    }
}

// ---------------------------------------------------------------------------
// report

struct ReportOptions {
    std::filesystem::path indoor;
    std::optional<std::filesystem::path> outdoor;
    std::string building;
    std::optional<Instant> from;  // inclusive day
    std::optional<Instant> to;    // inclusive day
    std::filesystem::path out = "-";
};

inline constexpr std::string_view kReportStyle = R"(body{font-family:sans-serif;margin:1.5em}
table{border-collapse:collapse;margin:1em 0}
td,th{border:1px solid #ccc;padding:2px 6px;text-align:right}
th{background:#f0f0f0}
td.good{background:#b7e4b0}
td.moderate{background:#ffe08a}
td.poor{background:#f4a6a6}
td.na{color:#999}
.banner{padding:1em;background:#fff3cd;border:1px solid #e0c36a}
)";

struct ReportParameter {
    std::string name;
    Field field;
};

inline std::string render_report(const std::vector<SensorReading>& indoor, const std::vector<OutdoorObservation>* outdoor,
                                 const ReportOptions& opt, const ThresholdTable& thresholds) {
    std::vector<SensorReading> rows;
    for (const auto& r : indoor) {
        if (r.building_id == opt.building) rows.push_back(r);
    }
    if (rows.empty()) fail(ErrorKind::InvalidArgument, "building '" + opt.building + "' not present in the indoor file");
    auto hourly = building_hourly_means(rows);
    if (outdoor) hourly = join_hourly(hourly, *outdoor);
    const Instant lo = opt.from.value_or(Instant::min());
    const Instant hi = opt.to ? *opt.to + std::chrono::days{1} : Instant::max();
    std::erase_if(hourly, [&](const HourlyRecord& r) { return r.timestamp < lo || r.timestamp >= hi; });

    std::vector<ReportParameter> params;
    for (auto name : kBandedParameters) {
        const Field f = *field_from_name(name);
        if (f == Field::sp_pa && !outdoor) continue;
        params.push_back({std::string(name), f});
    }

    std::ostringstream os;
    os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Indoor air quality: "
       << html_escape(opt.building) << "</title>\n<style>\n" << kReportStyle << "</style></head><body>\n";
    os << "<h1>Indoor air quality report: building " << html_escape(opt.building) << "</h1>\n";
    os << "<p>Period: " << (opt.from ? format_date(*opt.from) : std::string("start")) << " to "
       << (opt.to ? format_date(*opt.to) : std::string("end")) << "</p>\n";
    if (hourly.empty()) {
        os << "<div class=\"banner\">no data for the selected building and date range</div>\n</body></html>\n";
        return os.str();
    }

    os << "<h2>Summary</h2>\n<table><tr><th>parameter</th><th>n</th><th>min</th><th>max</th><th>median</th>"
          "<th>IQR</th><th>mean</th><th>SD</th></tr>\n";
    for (const auto& p : params) {
        std::vector<double> v;
        for (const auto& r : hourly) {
            if (r[p.field]) v.push_back(*r[p.field]);
        }
        os << "<tr><th>" << p.name << "</th>";
        if (v.empty()) {
            os << "<td>0</td><td class=\"na\" colspan=\"6\">NA</td></tr>\n";
            continue;
        }
        const auto s = summary_stats(std::span<const double>(v));
        os << "<td>" << s.n << "</td><td>" << fixed(s.min, 2) << "</td><td>" << fixed(s.max, 2) << "</td><td>"
           << fixed(s.median, 2) << "</td><td>" << fixed(s.iqr, 2) << "</td><td>" << fixed(s.mean, 2) << "</td><td>"
           << fixed(s.sd, 2) << "</td></tr>\n";
    }
    os << "</table>\n";

    std::vector<Instant> t;
    std::vector<double> pm25;
    for (const auto& r : hourly) {
        if (r[Field::pm25]) t.push_back(r.timestamp), pm25.push_back(*r[Field::pm25]);
    }
    if (pm25.size() >= 2) {
        const auto x = hours_since_start(t);
        const std::vector<ChartSeries> series = {
            {"hourly PM2.5", x, pm25, "#1f77b4", true},
            {"LOESS (span 0.2)", x, loess_smooth(x, pm25, 0.2), "#d62728", false},
        };
        os << "<h2>PM2.5 trend</h2>\n"
           << svg_line_chart(series, "Hourly PM2.5 from " + format_instant(t.front()), "hours since start",
                             "PM2.5 (ug/m3)");
    }

    os << "<h2>Hourly values</h2>\n<table><tr><th>timestamp</th>";
    for (const auto& p : params) os << "<th>" << p.name << "</th>";
    os << "</tr>\n";
    for (const auto& r : hourly) {
        os << "<tr><th>" << format_instant(r.timestamp) << "</th>";
        for (const auto& p : params) {
            const auto& m = r[p.field];
            if (!m) {
                os << "<td class=\"na\">NA</td>";
                continue;
            }
            const auto it = thresholds.find(p.name);
            const std::string cls = it == thresholds.end() ? "" : std::string(to_string(it->second.classify(*m)));
            os << "<td class=\"" << cls << "\">" << fixed(*m, 2) << "</td>";
        }
        os << "</tr>\n";
    }
    os << "</table>\n</body></html>\n";
    return os.str();
}

inline void cmd_report(const ReportOptions& opt, const CommandContext& ctx) {
    if (opt.from && opt.to && *opt.to < *opt.from) fail(ErrorKind::InvalidArgument, "--to is before --from");
    const auto indoor = load_indoor(opt.indoor);
    std::optional<std::vector<OutdoorObservation>> outdoor;
    if (opt.outdoor) outdoor = load_outdoor(*opt.outdoor);
    write_atomic(opt.out, render_report(indoor, outdoor ? &*outdoor : nullptr, opt, ctx.config.thresholds));
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
    SynthConfig synth;
    std::filesystem::path out_dir = ".";
};

inline void cmd_synth(const SynthOptions& opt, const CommandContext&) {
    const auto data = generate(opt.synth);
    std::ostringstream indoor, outdoor;
    write_indoor_csv(indoor, data.indoor);
    write_outdoor_csv(outdoor, data.outdoor);
    write_atomic(opt.out_dir / "indoor.csv", indoor.str());
    write_atomic(opt.out_dir / "outdoor.csv", outdoor.str());
}

}  // namespace aerostack
