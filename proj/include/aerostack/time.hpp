#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace aerostack {

/// UTC instant at one-second resolution.
using Instant = std::chrono::sys_seconds;
using Hours = std::chrono::hours;

namespace detail {

inline bool parse_fixed_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > text.size()) return false;
    for (std::size_t i = pos; i < pos + width; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
    return ec == std::errc{} && ptr == text.data() + pos + width;
}

inline std::optional<std::chrono::sys_days> parse_ymd(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!parse_fixed_int(text, 0, 4, y) || !parse_fixed_int(text, 5, 2, m) ||
        !parse_fixed_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

}  // namespace detail

/// Parses `YYYY-MM-DDTHH:MM:SSZ`. Nothing else is accepted.
inline std::optional<Instant> parse_instant(std::string_view text) {
    if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    auto day = detail::parse_ymd(text.substr(0, 10));
    int hh = 0, mm = 0, ss = 0;
    if (!day || !detail::parse_fixed_int(text, 11, 2, hh) || !detail::parse_fixed_int(text, 14, 2, mm) ||
        !detail::parse_fixed_int(text, 17, 2, ss)) {
        return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return Instant{*day} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

/// Parses a bare `YYYY-MM-DD` date as midnight UTC.
inline std::optional<Instant> parse_date(std::string_view text) {
    if (text.size() != 10) return std::nullopt;
    auto day = detail::parse_ymd(text);
    if (!day) return std::nullopt;
    return Instant{*day};
}

inline std::string format_instant(Instant t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

inline std::string format_date(Instant t) {
    const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline Instant floor_hour(Instant t) { return std::chrono::floor<Hours>(t); }

inline bool is_hour_aligned(Instant t) { return floor_hour(t) == t; }

inline std::chrono::sys_days utc_day(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

enum class Season : int { summer = 1, autumn = 2, winter = 3, spring = 4 };

/// Southern-Hemisphere meteorological seasons: DJF summer, MAM autumn,
/// JJA winter, SON spring.
constexpr Season southern_season(unsigned month) {
    switch (month) {
        case 12: case 1: case 2: return Season::summer;
        case 3: case 4: case 5: return Season::autumn;
        case 6: case 7: case 8: return Season::winter;
        default: return Season::spring;
    }
}

struct CalendarFields {
    int year;
    int month;    // 1-12
    int day;      // 1-31
    int weekday;  // Monday = 0
    int hour;     // 0-23
    Season season;
};

inline CalendarFields calendar_fields(Instant t) {
    const auto day = utc_day(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::weekday wd{day};
    const auto hour = std::chrono::duration_cast<Hours>(t - day).count();
    const auto month = static_cast<unsigned>(ymd.month());
    return CalendarFields{static_cast<int>(ymd.year()),
                          static_cast<int>(month),
                          static_cast<int>(static_cast<unsigned>(ymd.day())),
                          static_cast<int>(wd.iso_encoding()) - 1,
                          static_cast<int>(hour),
                          southern_season(month)};
}

}  // namespace aerostack
