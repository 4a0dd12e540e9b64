#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "aerostack/aerostack.hpp"

namespace {

using namespace aerostack;

Instant date_arg(const std::string& text, const char* flag) {
    const auto t = parse_date(text);
    if (!t) fail(ErrorKind::InvalidArgument, std::string(flag) + " expects YYYY-MM-DD, got '" + text + "'");
    return *t;
}

BushfireEpisode bushfire_arg(const std::string& text) {
    BushfireEpisode b;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> b.start_day >> c1 >> b.length_days >> c2 >> b.spike) || c1 != ':' || c2 != ':' || !is.eof()) {
        fail(ErrorKind::InvalidArgument, "--bushfire expects start:length:spike, got '" + text + "'");
    }
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indoor PM2.5 forecasting and reporting toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "Seed overriding stack.seed (and the synth seed)");
    app.add_option("--out", out, "Output path (directory for synth; '-' for stdout)");
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    std::string indoor, outdoor, csv, svg, building, from, to, sensor, bushfire;
    ImportanceOptions imp;
    std::string on = "test";
    SynthConfig synth;

    auto* stats = app.add_subcommand("stats", "Descriptive statistics of hourly PM2.5 per building");
    stats->add_option("--indoor", indoor, "Indoor sensor CSV")->required();

    auto* backtest = app.add_subcommand("backtest", "Rolling-window backtest of the stack and benchmarks");
    backtest->add_option("--indoor", indoor, "Indoor sensor CSV")->required();
    backtest->add_option("--outdoor", outdoor, "Outdoor observation CSV");
    backtest->add_option("--csv", csv, "Summary table path (default: --out with .csv)");

    auto* corr = app.add_subcommand("correlate", "Indoor/outdoor PM2.5 Spearman correlation per building");
    corr->add_option("--indoor", indoor, "Indoor sensor CSV")->required();
    corr->add_option("--outdoor", outdoor, "Outdoor observation CSV")->required();
    corr->add_option("--svg", svg, "Trend chart with LOESS lines");

    auto* importance = app.add_subcommand("importance", "Permutation importance of the feature set");
    importance->add_option("--indoor", indoor, "Indoor sensor CSV")->required();
    importance->add_option("--outdoor", outdoor, "Outdoor observation CSV");
    importance->add_option("--model", imp.model, "rf, gbt, svr, glm or deml")->capture_default_str();
    importance->add_option("--sensor", sensor, "Sensor to analyse (default: first in file)");
    importance->add_option("--n-perm", imp.n_perm, "Permutations per feature")->capture_default_str();
    importance->add_option("--on", on, "Evaluate on 'test' or 'train' rows")->capture_default_str();
    importance->add_option("--top", imp.top, "Rows to emit")->capture_default_str();
    importance->add_flag("--inject-target-copy", imp.inject_target_copy, "Add an exact copy of the target as a feature");
    importance->add_option("--svg", svg, "Horizontal bar chart path");

    auto* report = app.add_subcommand("report", "Colour-coded HTML report for one building");
    report->add_option("--indoor", indoor, "Indoor sensor CSV")->required();
    report->add_option("--outdoor", outdoor, "Outdoor observation CSV (adds sp_pa)");
    report->add_option("--building", building, "Building id")->required();
    report->add_option("--from", from, "First day, YYYY-MM-DD");
    report->add_option("--to", to, "Last day, YYYY-MM-DD");

    auto* syn = app.add_subcommand("synth", "Write a synthetic indoor/outdoor dataset");
    syn->add_option("--days", synth.n_days, "Number of days")->capture_default_str();
    syn->add_option("--alpha", synth.outdoor_coupling, "Outdoor coupling in [0, 1]")->capture_default_str();
    syn->add_option("--amplitude", synth.diurnal_amplitude, "Outdoor diurnal amplitude")->capture_default_str();
    syn->add_option("--phi", synth.ar_coefficient, "AR(1) coefficient")->capture_default_str();
    syn->add_option("--noise-sd", synth.noise_sd, "Noise standard deviation")->capture_default_str();
    syn->add_option("--bushfire", bushfire, "Episode as start_day:length_days:spike (0-based day)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads > 0) set_worker_threads(threads);
        CommandContext ctx;
        if (!config_path.empty()) ctx.config = load_run_config(config_path);
        if (seed) ctx.config.stack.seed = *seed;
        const std::filesystem::path out_path = out.empty() ? std::filesystem::path("-") : std::filesystem::path(out);

        if (*stats) {
            cmd_stats({indoor, out_path}, ctx);
        } else if (*backtest) {
            BacktestOptions opt{indoor, std::nullopt, out_path, std::nullopt};
            if (!outdoor.empty()) opt.outdoor = outdoor;
            if (!csv.empty()) opt.csv = csv;
            cmd_backtest(opt, ctx);
        } else if (*corr) {
            CorrelateOptions opt{indoor, outdoor, out_path, std::nullopt};
            if (!svg.empty()) opt.svg = svg;
            cmd_correlate(opt, ctx);
        } else if (*importance) {
            if (on != "test" && on != "train") fail(ErrorKind::InvalidArgument, "--on must be 'test' or 'train'");
            imp.indoor = indoor;
            if (!outdoor.empty()) imp.outdoor = outdoor;
            if (!sensor.empty()) imp.sensor = sensor;
            if (!svg.empty()) imp.svg = svg;
            imp.on_test = on == "test";
            imp.out = out_path;
            cmd_importance(imp, ctx);
        } else if (*report) {
            ReportOptions opt;
            opt.indoor = indoor;
            if (!outdoor.empty()) opt.outdoor = outdoor;
            opt.building = building;
            if (!from.empty()) opt.from = date_arg(from, "--from");
            if (!to.empty()) opt.to = date_arg(to, "--to");
            opt.out = out_path;
            cmd_report(opt, ctx);
        } else if (*syn) {
            if (seed) synth.seed = *seed;
            if (!bushfire.empty()) synth.bushfire = bushfire_arg(bushfire);
            cmd_synth({synth, out.empty() ? std::filesystem::path(".") : std::filesystem::path(out)}, ctx);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return is_input_error(e.kind()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
