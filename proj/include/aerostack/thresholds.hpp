#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "aerostack/error.hpp"

namespace aerostack {

enum class Band { good, moderate, poor };

constexpr std::string_view to_string(Band b) {
    switch (b) {
        case Band::good: return "good";
        case Band::moderate: return "moderate";
        case Band::poor: return "poor";
    }
    return "?";
}

/// Maps a value to a band. Interval i is [breakpoints[i-1], breakpoints[i]),
/// so a value equal to a breakpoint falls in the upper band.
struct ThresholdBands {
    std::vector<double> breakpoints;
    std::vector<Band> bands;  // breakpoints.size() + 1 entries

    static ThresholdBands ascending(double moderate_from, double poor_from) {
        return {{moderate_from, poor_from}, {Band::good, Band::moderate, Band::poor}};
    }

    Band classify(double v) const {
        std::size_t i = 0;
        while (i < breakpoints.size() && v >= breakpoints[i]) ++i;
        return bands[i];
    }

    void validate(const std::string& parameter) const {
        if (bands.size() != breakpoints.size() + 1) {
            fail(ErrorKind::InvalidConfig, "thresholds." + parameter + ": need one more band than breakpoints");
        }
        for (std::size_t i = 1; i < breakpoints.size(); ++i) {
            if (!(breakpoints[i] > breakpoints[i - 1])) {
                fail(ErrorKind::InvalidConfig, "thresholds." + parameter + ": breakpoints must be strictly increasing");
            }
        }
    }

    bool operator==(const ThresholdBands&) const = default;
};

inline constexpr std::string_view kBandedParameters[] = {"pm25", "pm10", "tvoc", "temp_c", "rh_pct", "sp_pa"};

using ThresholdTable = std::map<std::string, ThresholdBands, std::less<>>;

/// Defaults: pm25 good < 12, moderate 12-35, poor above (µg/m³). The other
/// parameters use common indoor-comfort ranges.
inline ThresholdTable default_thresholds() {
    using enum Band;
    ThresholdTable t;
    t["pm25"] = ThresholdBands::ascending(12.0, 35.0);
    t["pm10"] = ThresholdBands::ascending(54.0, 154.0);
    t["tvoc"] = ThresholdBands::ascending(220.0, 660.0);
    t["temp_c"] = {{16.0, 18.0, 26.0, 28.0}, {poor, moderate, good, moderate, poor}};
    t["rh_pct"] = {{20.0, 30.0, 60.0, 70.0}, {poor, moderate, good, moderate, poor}};
    t["sp_pa"] = {{95000.0, 98000.0, 104000.0, 106000.0}, {poor, moderate, good, moderate, poor}};
    return t;
}

}  // namespace aerostack
