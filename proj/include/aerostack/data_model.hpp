#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aerostack/error.hpp"
#include "aerostack/time.hpp"

namespace aerostack {

using Measure = std::optional<double>;

struct SensorReading {
    Instant timestamp;
    std::string sensor_id;
    std::string building_id;
    Measure lat;
    Measure lon;
    Measure pm25;
    Measure pm10;
    Measure tvoc;
    Measure temp_c;
    Measure rh_pct;

    bool operator==(const SensorReading&) const = default;
};

struct OutdoorObservation {
    Instant timestamp;
    std::string building_id;
    Measure pm25_out;
    Measure t2m_c;
    Measure d2m_c;
    Measure wind10m_ms;
    Measure sp_pa;
    Measure ssrd_wm2;
    Measure tp_mm;

    bool operator==(const OutdoorObservation&) const = default;
};

/// Numeric fields carried by a joined sensor-hour. Order is stable and used
/// for indexing into HourlyRecord::values.
enum class Field : std::size_t {
    lat,
    lon,
    pm25,
    pm10,
    tvoc,
    temp_c,
    rh_pct,
    pm25_out,
    t2m_c,
    d2m_c,
    wind10m_ms,
    sp_pa,
    ssrd_wm2,
    tp_mm,
};

inline constexpr std::size_t kFieldCount = 14;
inline constexpr std::size_t kFirstOutdoorField = static_cast<std::size_t>(Field::pm25_out);

inline constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "lat",   "lon",   "pm25",       "pm10",  "tvoc",     "temp_c", "rh_pct",
    "pm25_out", "t2m_c", "d2m_c", "wind10m_ms", "sp_pa", "ssrd_wm2", "tp_mm",
};

constexpr std::string_view field_name(Field f) { return kFieldNames[static_cast<std::size_t>(f)]; }

inline std::optional<Field> field_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        if (kFieldNames[i] == name) return static_cast<Field>(i);
    }
    return std::nullopt;
}

/// One sensor-hour. Any field may be missing.
struct HourlyRecord {
    Instant timestamp;
    std::string sensor_id;
    std::string building_id;
    std::array<Measure, kFieldCount> values{};

    Measure& operator[](Field f) { return values[static_cast<std::size_t>(f)]; }
    const Measure& operator[](Field f) const { return values[static_cast<std::size_t>(f)]; }

    bool operator==(const HourlyRecord&) const = default;
};

struct SummaryStats {
    std::size_t n = 0;
    double min = 0;
    double max = 0;
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double iqr = 0;
    double mean = 0;
    double sd = 0;
};

inline constexpr std::string_view kIndoorHeader =
    "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct";
inline constexpr std::string_view kOutdoorHeader =
    "timestamp,building_id,pm25_out,t2m_c,d2m_c,wind10m_ms,sp_pa,ssrd_wm2,tp_mm";

// ---------------------------------------------------------------------------
// CSV plumbing

namespace csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

inline bool is_missing_token(std::string_view cell) {
    if (cell.empty()) return true;
    return cell.size() == 2 && (cell[0] == 'N' || cell[0] == 'n') && (cell[1] == 'A' || cell[1] == 'a');
}

/// Missing token, unparsable text and non-finite values all read as missing.
inline Measure parse_number(std::string_view cell) {
    if (is_missing_token(cell)) return std::nullopt;
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

inline std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

inline std::string format_measure(const Measure& m) { return m ? format_number(*m) : std::string("NA"); }

struct Table {
    std::vector<std::string> lines;  // data lines, header removed
    std::vector<std::size_t> line_numbers;
    std::vector<std::size_t> column_of;  // schema column -> file column
    std::size_t width = 0;
};

/// Reads a CSV whose header must contain every column of `schema` (any
/// order, extra columns ignored).
inline Table read_table(const std::filesystem::path& path, std::string_view schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::MissingFile, "cannot open '" + path.string() + "'");
    std::string header;
    if (!std::getline(in, header)) fail(ErrorKind::SchemaMismatch, "'" + path.string() + "' has no header line");
    if (header.size() >= 3 && static_cast<unsigned char>(header[0]) == 0xEF) header.erase(0, 3);  // UTF-8 BOM

    const auto file_cols = split(header);
    const auto schema_cols = split(schema);
    Table table;
    table.width = file_cols.size();
    std::string missing;
    for (auto col : schema_cols) {
        const auto it = std::find(file_cols.begin(), file_cols.end(), col);
        if (it == file_cols.end()) {
            missing += missing.empty() ? "" : ", ";
            missing += col;
            table.column_of.push_back(0);
        } else {
            table.column_of.push_back(static_cast<std::size_t>(it - file_cols.begin()));
        }
    }
    if (!missing.empty()) {
        fail(ErrorKind::SchemaMismatch, "'" + path.string() + "' is missing columns: " + missing);
    }
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        table.lines.push_back(std::move(line));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

inline std::vector<std::string_view> row_cells(const Table& table, std::size_t i, const std::string& source) {
    auto cells = split(table.lines[i]);
    if (cells.size() != table.width) {
        fail(ErrorKind::SchemaMismatch, source + " line " + std::to_string(table.line_numbers[i]) + ": expected " +
                                            std::to_string(table.width) + " cells, found " +
                                            std::to_string(cells.size()));
    }
    std::vector<std::string_view> ordered;
    ordered.reserve(table.column_of.size());
    for (auto c : table.column_of) ordered.push_back(cells[c]);
    return ordered;
}

inline Instant row_timestamp(std::string_view cell, const Table& table, std::size_t i, const std::string& source) {
    auto t = parse_instant(cell);
    if (!t) {
        fail(ErrorKind::BadTimestamp, source + " line " + std::to_string(table.line_numbers[i]) +
                                          ": malformed timestamp '" + std::string(cell) + "'");
    }
    return *t;
}

}  // namespace csv

// Physically impossible values are treated like unreadable cells.
inline Measure within(Measure m, double lo, double hi) {
    if (m && (*m < lo || *m > hi)) return std::nullopt;
    return m;
}
inline Measure nonnegative(Measure m) { return within(m, 0.0, HUGE_VAL); }

// ---------------------------------------------------------------------------
// Parsing

inline std::vector<SensorReading> parse_indoor_csv(const std::filesystem::path& path) {
    const auto table = csv::read_table(path, kIndoorHeader);
    const std::string source = path.filename().string();
    std::vector<SensorReading> out;
    out.reserve(table.lines.size());
    for (std::size_t i = 0; i < table.lines.size(); ++i) {
        const auto c = csv::row_cells(table, i, source);
        SensorReading r;
        r.timestamp = csv::row_timestamp(c[0], table, i, source);
        r.sensor_id = std::string(c[1]);
        r.building_id = std::string(c[2]);
        r.lat = within(csv::parse_number(c[3]), -90.0, 90.0);
        r.lon = within(csv::parse_number(c[4]), -180.0, 180.0);
        r.pm25 = nonnegative(csv::parse_number(c[5]));
        r.pm10 = nonnegative(csv::parse_number(c[6]));
        r.tvoc = nonnegative(csv::parse_number(c[7]));
        r.temp_c = csv::parse_number(c[8]);
        r.rh_pct = within(csv::parse_number(c[9]), 0.0, 100.0);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<OutdoorObservation> parse_outdoor_csv(const std::filesystem::path& path) {
    const auto table = csv::read_table(path, kOutdoorHeader);
    const std::string source = path.filename().string();
    std::vector<OutdoorObservation> out;
    out.reserve(table.lines.size());
    for (std::size_t i = 0; i < table.lines.size(); ++i) {
        const auto c = csv::row_cells(table, i, source);
        OutdoorObservation o;
        o.timestamp = csv::row_timestamp(c[0], table, i, source);
        if (!is_hour_aligned(o.timestamp)) {
            fail(ErrorKind::BadTimestamp, source + " line " + std::to_string(table.line_numbers[i]) +
                                              ": outdoor timestamp is not hour-aligned");
        }
        o.building_id = std::string(c[1]);
        o.pm25_out = nonnegative(csv::parse_number(c[2]));
        o.t2m_c = csv::parse_number(c[3]);
        o.d2m_c = csv::parse_number(c[4]);
        o.wind10m_ms = nonnegative(csv::parse_number(c[5]));
        o.sp_pa = nonnegative(csv::parse_number(c[6]));
        o.ssrd_wm2 = csv::parse_number(c[7]);
        o.tp_mm = nonnegative(csv::parse_number(c[8]));
        out.push_back(std::move(o));
    }
    return out;
}

inline void write_indoor_csv(std::ostream& os, std::span<const SensorReading> rows) {
    os << kIndoorHeader << '\n';
    for (const auto& r : rows) {
        os << format_instant(r.timestamp) << ',' << r.sensor_id << ',' << r.building_id << ','
           << csv::format_measure(r.lat) << ',' << csv::format_measure(r.lon) << ',' << csv::format_measure(r.pm25)
           << ',' << csv::format_measure(r.pm10) << ',' << csv::format_measure(r.tvoc) << ','
           << csv::format_measure(r.temp_c) << ',' << csv::format_measure(r.rh_pct) << '\n';
    }
}

inline void write_outdoor_csv(std::ostream& os, std::span<const OutdoorObservation> rows) {
    os << kOutdoorHeader << '\n';
    for (const auto& o : rows) {
        os << format_instant(o.timestamp) << ',' << o.building_id << ',' << csv::format_measure(o.pm25_out) << ','
           << csv::format_measure(o.t2m_c) << ',' << csv::format_measure(o.d2m_c) << ','
           << csv::format_measure(o.wind10m_ms) << ',' << csv::format_measure(o.sp_pa) << ','
           << csv::format_measure(o.ssrd_wm2) << ',' << csv::format_measure(o.tp_mm) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Hourly aggregation and join

/// Hour-mean of each indoor field over the readings of one sensor. Hours
/// without readings are absent from the output.
inline std::vector<HourlyRecord> hourly_aggregate(std::span<const SensorReading> readings) {
    if (readings.empty()) return {};
    const std::string& sensor = readings.front().sensor_id;

    struct Accumulator {
        std::array<double, kFirstOutdoorField> sum{};
        std::array<std::size_t, kFirstOutdoorField> count{};
        const SensorReading* first = nullptr;
    };
    std::map<Instant, Accumulator> hours;
    for (const auto& r : readings) {
        if (r.sensor_id != sensor) {
            fail(ErrorKind::MixedSensors, "readings for '" + sensor + "' and '" + r.sensor_id + "' mixed");
        }
        auto& acc = hours[floor_hour(r.timestamp)];
        if (!acc.first) acc.first = &r;
        const std::array<const Measure*, kFirstOutdoorField> fields = {&r.lat,  &r.lon,    &r.pm25,  &r.pm10,
                                                                       &r.tvoc, &r.temp_c, &r.rh_pct};
        for (std::size_t f = 0; f < fields.size(); ++f) {
            if (*fields[f]) {
                acc.sum[f] += **fields[f];
                ++acc.count[f];
            }
        }
    }

    std::vector<HourlyRecord> out;
    out.reserve(hours.size());
    for (const auto& [hour, acc] : hours) {
        HourlyRecord rec;
        rec.timestamp = hour;
        rec.sensor_id = sensor;
        rec.building_id = acc.first->building_id;
        for (std::size_t f = 0; f < kFirstOutdoorField; ++f) {
            if (acc.count[f] > 0) rec.values[f] = acc.sum[f] / static_cast<double>(acc.count[f]);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

/// Splits readings by sensor id, preserving first-appearance order of sensors.
inline std::vector<std::vector<SensorReading>> group_by_sensor(std::span<const SensorReading> readings) {
    std::vector<std::vector<SensorReading>> groups;
    std::map<std::string, std::size_t> index;
    for (const auto& r : readings) {
        auto [it, inserted] = index.try_emplace(r.sensor_id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(r);
    }
    return groups;
}

/// Left join on (building_id, hour): every indoor record survives; outdoor
/// fields are filled where a matching outdoor hour exists.
inline std::vector<HourlyRecord> join_hourly(std::span<const HourlyRecord> indoor,
                                             std::span<const OutdoorObservation> outdoor) {
    std::map<std::pair<std::string_view, Instant>, const OutdoorObservation*> by_key;
    for (const auto& o : outdoor) by_key.try_emplace({std::string_view(o.building_id), o.timestamp}, &o);

    std::vector<HourlyRecord> out(indoor.begin(), indoor.end());
    for (auto& rec : out) {
        const auto it = by_key.find({std::string_view(rec.building_id), rec.timestamp});
        if (it == by_key.end()) continue;
        const OutdoorObservation& o = *it->second;
        rec[Field::pm25_out] = o.pm25_out;
        rec[Field::t2m_c] = o.t2m_c;
        rec[Field::d2m_c] = o.d2m_c;
        rec[Field::wind10m_ms] = o.wind10m_ms;
        rec[Field::sp_pa] = o.sp_pa;
        rec[Field::ssrd_wm2] = o.ssrd_wm2;
        rec[Field::tp_mm] = o.tp_mm;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Descriptive statistics

/// Quantile of sorted data by linear interpolation at h = (n-1)p.
inline double interpolated_quantile(std::span<const double> sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Summary of the finite entries of `values`. SD uses the n-1 denominator
/// and is 0 for a single value.
inline SummaryStats summary_stats(std::span<const double> values) {
    std::vector<double> v;
    v.reserve(values.size());
    for (double x : values) {
        if (std::isfinite(x)) v.push_back(x);
    }
    if (v.empty()) fail(ErrorKind::EmptyInput, "no values left after removing missing entries");
    std::sort(v.begin(), v.end());

    SummaryStats s;
    s.n = v.size();
    s.min = v.front();
    s.max = v.back();
    s.q1 = interpolated_quantile(v, 0.25);
    s.median = interpolated_quantile(v, 0.5);
    s.q3 = interpolated_quantile(v, 0.75);
    s.iqr = s.q3 - s.q1;
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
    return s;
}

inline SummaryStats summary_stats(std::span<const Measure> values) {
    std::vector<double> v;
    v.reserve(values.size());
    for (const auto& m : values) v.push_back(m ? *m : std::nan(""));
    return summary_stats(std::span<const double>(v));
}

}  // namespace aerostack
