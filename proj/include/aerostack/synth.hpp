#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aerostack/data_model.hpp"
#include "aerostack/error.hpp"
#include "aerostack/parallel.hpp"
#include "aerostack/time.hpp"

namespace aerostack {

struct BushfireEpisode {
    int start_day = 0;    // 0-based day index from the series start
    int length_days = 1;
    double spike = 0;     // added to outdoor PM2.5 during the episode, µg/m³

    bool operator==(const BushfireEpisode&) const = default;
};

struct SynthConfig {
    std::uint64_t seed = 42;
    int n_days = 60;
    double outdoor_coupling = 0.6;   // alpha
    double diurnal_amplitude = 2.0;  // µg/m³
    double ar_coefficient = 0.8;     // phi
    double noise_sd = 0.5;           // µg/m³
    std::optional<BushfireEpisode> bushfire;
    Instant start = Instant{std::chrono::sys_days{std::chrono::year{2020} / 1 / 1}};
    std::string sensor_id = "S001";
    std::string building_id = "B001";
    double lat = -35.3;
    double lon = 149.1;

    void validate() const {
        if (n_days < 2) fail(ErrorKind::InvalidArgument, "synth needs n_days >= 2");
        if (!(outdoor_coupling >= 0 && outdoor_coupling <= 1)) {
            fail(ErrorKind::InvalidArgument, "outdoor coupling must lie in [0, 1]");
        }
        if (!(std::abs(ar_coefficient) < 1)) fail(ErrorKind::InvalidArgument, "|ar_coefficient| must be < 1");
        if (!(noise_sd >= 0)) fail(ErrorKind::InvalidArgument, "noise_sd must be >= 0");
        if (bushfire && (bushfire->length_days < 1 || bushfire->start_day < 0)) {
            fail(ErrorKind::InvalidArgument, "bushfire episode needs start_day >= 0 and length_days >= 1");
        }
    }
};

struct SynthData {
    std::vector<SensorReading> indoor;
    std::vector<OutdoorObservation> outdoor;
};

/// Hourly synthetic series for one sensor in one building.
///
///   outdoor(t) = max(0, 5 + A sin(2 pi (hour - 9) / 24) + e(t) + spike(t)),
///                e AR(1) with coefficient phi and innovation sd noise_sd
///   indoor(t)  = max(0, (1 - alpha) base(t) + alpha outdoor(t - 1) + noise)
///                base = 2 + independent AR(1)
///   pm10       = 1.6 pm25 + noise
///
/// Each component draws from its own seeded stream, so switching the
/// bushfire episode on changes nothing but the spike.
inline SynthData generate(const SynthConfig& cfg) {
    cfg.validate();
    const auto hours = static_cast<std::size_t>(cfg.n_days) * 24;
    Rng out_rng(mix_seed(cfg.seed, 1));
    Rng in_rng(mix_seed(cfg.seed, 2));
    Rng noise_rng(mix_seed(cfg.seed, 3));
    Rng cov_rng(mix_seed(cfg.seed, 4));
    std::normal_distribution<double> unit(0.0, 1.0);
    const double phi = cfg.ar_coefficient;
    const double sd = cfg.noise_sd;
    // start both AR(1) processes in their stationary distribution
    const double stationary = sd / std::sqrt(1.0 - phi * phi);

    auto diurnal = [&](int hour) { return std::sin(2.0 * std::numbers::pi * (hour - 9) / 24.0); };

    // outdoor carries one extra leading hour so indoor(0) has a lag-1 driver
    std::vector<double> outdoor(hours + 1);
    double e = stationary * unit(out_rng);
    for (std::size_t k = 0; k <= hours; ++k) {
        if (k > 0) e = phi * e + sd * unit(out_rng);
        const long h = static_cast<long>(k) - 1;  // hour offset from series start
        const int hour_of_day = static_cast<int>(((h % 24) + 24) % 24);
        double v = 5.0 + cfg.diurnal_amplitude * diurnal(hour_of_day) + e;
        if (cfg.bushfire && h >= 0) {
            const long day = h / 24;
            if (day >= cfg.bushfire->start_day && day < cfg.bushfire->start_day + cfg.bushfire->length_days) {
                v += cfg.bushfire->spike;
            }
        }
        outdoor[k] = std::max(0.0, v);
    }

    SynthData data;
    data.indoor.reserve(hours);
    data.outdoor.reserve(hours);
    const double alpha = cfg.outdoor_coupling;
    double u = stationary * unit(in_rng);
    double tvoc_dev = 0, temp_dev = 0, rh_dev = 0, press_dev = 0, wind_dev = 0;
    for (std::size_t k = 0; k < hours; ++k) {
        if (k > 0) u = phi * u + sd * unit(in_rng);
        const Instant t = cfg.start + Hours{static_cast<long>(k)};
        const int hour_of_day = static_cast<int>(k % 24);
        const double base = 2.0 + u;
        const double pm25 = std::max(0.0, (1.0 - alpha) * base + alpha * outdoor[k] + sd * unit(noise_rng));
        const double pm10 = std::max(0.0, 1.6 * pm25 + sd * unit(noise_rng));

        tvoc_dev = 0.9 * tvoc_dev + 10.0 * unit(cov_rng);
        temp_dev = 0.95 * temp_dev + 0.2 * unit(cov_rng);
        rh_dev = 0.95 * rh_dev + 1.0 * unit(cov_rng);
        press_dev = 0.98 * press_dev + 20.0 * unit(cov_rng);
        wind_dev = 0.9 * wind_dev + 0.4 * unit(cov_rng);
        const double dayness = diurnal(hour_of_day);
        const double rain_draw = std::uniform_real_distribution<double>(0.0, 1.0)(cov_rng);

        SensorReading r;
        r.timestamp = t;
        r.sensor_id = cfg.sensor_id;
        r.building_id = cfg.building_id;
        r.lat = cfg.lat;
        r.lon = cfg.lon;
        r.pm25 = pm25;
        r.pm10 = pm10;
        r.tvoc = std::max(0.0, 150.0 + tvoc_dev);
        r.temp_c = 22.0 + 1.0 * dayness + temp_dev;
        r.rh_pct = std::clamp(50.0 + rh_dev - 3.0 * dayness, 0.0, 100.0);
        data.indoor.push_back(std::move(r));

        OutdoorObservation o;
        o.timestamp = t;
        o.building_id = cfg.building_id;
        o.pm25_out = outdoor[k + 1];
        const double t2m = 18.0 + 6.0 * dayness + 5.0 * temp_dev;
        o.t2m_c = t2m;
        o.d2m_c = t2m - 6.0 - std::abs(rh_dev) * 0.2;
        o.wind10m_ms = std::max(0.0, 3.0 + wind_dev + 0.8 * dayness);
        o.sp_pa = 101325.0 + press_dev;
        o.ssrd_wm2 = std::max(0.0, 850.0 * dayness);
        o.tp_mm = rain_draw < 0.05 ? 5.0 * rain_draw / 0.05 : 0.0;
        data.outdoor.push_back(std::move(o));
    }
    return data;
}

}  // namespace aerostack
