#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerostack/data_model.hpp"
#include "aerostack/error.hpp"
#include "aerostack/time.hpp"

namespace aerostack {

inline constexpr std::array<std::string_view, 6> kCalendarFeatures = {"year", "month", "day", "dow", "hour", "season"};

inline std::string lag_feature_name(int lag) { return "pm25_lag" + std::to_string(lag); }

inline std::vector<std::string> default_covariates() {
    return {"pm10", "tvoc", "temp_c", "rh_pct", "pm25_out", "t2m_c", "d2m_c", "wind10m_ms", "sp_pa", "ssrd_wm2", "tp_mm"};
}

/// Which columns go into the model matrix.
///
/// Column order: indoor PM2.5 lags (ascending as listed), calendar fields of
/// the target hour, coordinates, then covariates. Covariates are read from
/// the hour before the target, so nothing later than t-1 feeds row t apart
/// from the calendar and coordinates of t itself.
struct FeatureSchema {
    std::vector<int> lags{1, 2, 3, 4, 5, 6, 24};
    bool calendar = true;
    bool coordinates = true;
    std::vector<std::string> covariates = default_covariates();

    std::vector<std::string> feature_names() const {
        std::vector<std::string> names;
        for (int lag : lags) names.push_back(lag_feature_name(lag));
        if (calendar) {
            for (auto c : kCalendarFeatures) names.emplace_back(c);
        }
        if (coordinates) {
            names.emplace_back("lat");
            names.emplace_back("lon");
        }
        for (const auto& c : covariates) names.push_back(c);
        return names;
    }

    /// Largest look-back in hours any row needs.
    int max_lookback() const {
        int m = covariates.empty() ? 0 : 1;
        for (int lag : lags) m = std::max(m, lag);
        return m;
    }

    void validate() const {
        if (lags.empty()) fail(ErrorKind::EmptySchema, "feature schema needs at least one lag");
        for (int lag : lags) {
            if (lag < 1) fail(ErrorKind::InvalidArgument, "lags must be >= 1, got " + std::to_string(lag));
        }
        for (const auto& c : covariates) {
            const auto f = field_from_name(c);
            if (!f || *f == Field::pm25 || *f == Field::lat || *f == Field::lon) {
                fail(ErrorKind::UnknownColumn, "'" + c + "' is not a covariate field");
            }
        }
        const auto names = feature_names();
        std::set<std::string> seen;
        for (const auto& n : names) {
            if (!seen.insert(n).second) fail(ErrorKind::InvalidArgument, "duplicate feature '" + n + "'");
        }
    }

    bool operator==(const FeatureSchema&) const = default;
};

/// Dense model input: n rows of p named features plus the aligned target.
struct FeatureMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd x;  // n x p
    std::vector<Instant> timestamps;
    Eigen::VectorXd y;

    std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }
    bool empty() const { return x.rows() == 0; }

    std::optional<std::size_t> column(std::string_view name) const {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    }

    FeatureMatrix subset(std::span<const std::size_t> row_ids) const {
        FeatureMatrix out;
        out.names = names;
        out.x.resize(static_cast<Eigen::Index>(row_ids.size()), x.cols());
        out.y.resize(static_cast<Eigen::Index>(row_ids.size()));
        out.timestamps.reserve(row_ids.size());
        for (std::size_t i = 0; i < row_ids.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(row_ids[i]);
            out.x.row(static_cast<Eigen::Index>(i)) = x.row(r);
            out.y(static_cast<Eigen::Index>(i)) = y(r);
            out.timestamps.push_back(timestamps[row_ids[i]]);
        }
        return out;
    }

    /// Rows [begin, end).
    FeatureMatrix slice(std::size_t begin, std::size_t end) const {
        FeatureMatrix out;
        out.names = names;
        const auto b = static_cast<Eigen::Index>(begin);
        const auto n = static_cast<Eigen::Index>(end - begin);
        out.x = x.middleRows(b, n);
        out.y = y.segment(b, n);
        out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                              timestamps.begin() + static_cast<std::ptrdiff_t>(end));
        return out;
    }

    FeatureMatrix with_column(std::string name, const Eigen::VectorXd& values) const {
        if (column(name)) fail(ErrorKind::InvalidArgument, "column '" + name + "' already present");
        if (values.size() != x.rows()) fail(ErrorKind::LengthMismatch, "new column length differs from row count");
        FeatureMatrix out = *this;
        out.names.push_back(std::move(name));
        out.x.conservativeResize(Eigen::NoChange, x.cols() + 1);
        out.x.col(x.cols()) = values;
        return out;
    }
};

/// Maps each of `names` onto its column in `X`. Extra columns in X are
/// ignored; a missing one is a schema mismatch.
inline std::vector<Eigen::Index> resolve_columns(std::span<const std::string> names, const FeatureMatrix& X) {
    std::vector<Eigen::Index> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        const auto c = X.column(n);
        if (!c) fail(ErrorKind::SchemaMismatch, "feature '" + n + "' missing from input matrix");
        idx.push_back(static_cast<Eigen::Index>(*c));
    }
    return idx;
}

inline void require_finite(const FeatureMatrix& X) {
    if (!X.x.allFinite() || !X.y.allFinite()) fail(ErrorKind::NonFinite, "feature matrix contains non-finite values");
}

/// Builds one row per hour t whose target and every feature are present.
/// Records must belong to one sensor and be sorted and hour-aligned.
inline FeatureMatrix build_feature_matrix(std::span<const HourlyRecord> records, const FeatureSchema& schema) {
    schema.validate();
    FeatureMatrix out;
    out.names = schema.feature_names();
    const auto p = static_cast<Eigen::Index>(out.names.size());
    if (records.empty()) {
        out.x.resize(0, p);
        out.y.resize(0);
        return out;
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!is_hour_aligned(records[i].timestamp)) {
            fail(ErrorKind::InvalidArgument, "record at " + format_instant(records[i].timestamp) + " is not hour-aligned");
        }
        if (records[i].sensor_id != records.front().sensor_id) {
            fail(ErrorKind::MixedSensors, "feature matrix input mixes sensors");
        }
        if (i > 0 && records[i].timestamp <= records[i - 1].timestamp) {
            fail(ErrorKind::InvalidArgument, "records must be strictly increasing in time");
        }
    }

    std::vector<Field> covariate_fields;
    for (const auto& c : schema.covariates) covariate_fields.push_back(*field_from_name(c));

    auto find = [&](Instant t) -> const HourlyRecord* {
        const auto it = std::lower_bound(records.begin(), records.end(), t,
                                         [](const HourlyRecord& r, Instant v) { return r.timestamp < v; });
        return (it != records.end() && it->timestamp == t) ? &*it : nullptr;
    };

    std::vector<double> row(static_cast<std::size_t>(p));
    std::vector<double> values;
    std::vector<double> targets;
    for (const auto& rec : records) {
        const auto target = rec[Field::pm25];
        if (!target) continue;
        std::size_t k = 0;
        bool complete = true;
        for (int lag : schema.lags) {
            const HourlyRecord* prev = find(rec.timestamp - Hours{lag});
            if (!prev || !(*prev)[Field::pm25]) {
                complete = false;
                break;
            }
            row[k++] = *(*prev)[Field::pm25];
        }
        if (!complete) continue;
        if (schema.calendar) {
            const auto cal = calendar_fields(rec.timestamp);
            row[k++] = cal.year;
            row[k++] = cal.month;
            row[k++] = cal.day;
            row[k++] = cal.weekday;
            row[k++] = cal.hour;
            row[k++] = static_cast<int>(cal.season);
        }
        if (schema.coordinates) {
            if (!rec[Field::lat] || !rec[Field::lon]) continue;
            row[k++] = *rec[Field::lat];
            row[k++] = *rec[Field::lon];
        }
        if (!covariate_fields.empty()) {
            const HourlyRecord* prev = find(rec.timestamp - Hours{1});
            if (!prev) continue;
            for (Field f : covariate_fields) {
                if (!(*prev)[f]) {
                    complete = false;
                    break;
                }
                row[k++] = *(*prev)[f];
            }
            if (!complete) continue;
        }
        values.insert(values.end(), row.begin(), row.end());
        targets.push_back(*target);
        out.timestamps.push_back(rec.timestamp);
    }

    const auto n = static_cast<Eigen::Index>(targets.size());
    out.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, p);
    out.y = Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
    return out;
}

/// Per-column centering and scaling learned from training rows.
struct Standardizer {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> sd;  // 1 for constant columns

    FeatureMatrix apply(const FeatureMatrix& X) const {
        FeatureMatrix out = X;
        const auto idx = resolve_for(X);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out.x.col(idx[j]) = ((X.x.col(idx[j]).array() - mean[j]) / sd[j]).matrix();
        }
        return out;
    }

    FeatureMatrix invert(const FeatureMatrix& Z) const {
        FeatureMatrix out = Z;
        const auto idx = resolve_for(Z);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out.x.col(idx[j]) = (Z.x.col(idx[j]).array() * sd[j] + mean[j]).matrix();
        }
        return out;
    }

private:
    std::vector<Eigen::Index> resolve_for(const FeatureMatrix& X) const {
        std::vector<Eigen::Index> idx;
        for (const auto& c : columns) {
            const auto j = X.column(c);
            if (!j) fail(ErrorKind::UnknownColumn, "standardized column '" + c + "' not in matrix");
            idx.push_back(static_cast<Eigen::Index>(*j));
        }
        return idx;
    }
};

/// Learns mean and sample SD of `columns` (all columns when empty).
inline Standardizer fit_standardizer(const FeatureMatrix& X, std::span<const std::string> columns = {}) {
    if (X.empty()) fail(ErrorKind::EmptyInput, "cannot fit a standardizer on an empty matrix");
    Standardizer s;
    if (columns.empty()) {
        s.columns = X.names;
    } else {
        s.columns.assign(columns.begin(), columns.end());
    }
    const double n = static_cast<double>(X.rows());
    for (const auto& c : s.columns) {
        const auto j = X.column(c);
        if (!j) fail(ErrorKind::UnknownColumn, "column '" + c + "' not in matrix");
        const auto col = X.x.col(static_cast<Eigen::Index>(*j));
        if (col.maxCoeff() == col.minCoeff()) {
            s.mean.push_back(col(0));
            s.sd.push_back(1.0);
            continue;
        }
        const double m = col.mean();
        const double ss = (col.array() - m).square().sum();
        const double sd = X.rows() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        s.mean.push_back(m);
        s.sd.push_back(sd > 0 && std::isfinite(sd) ? sd : 1.0);
    }
    return s;
}

inline FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& X) { return s.apply(X); }

}  // namespace aerostack
