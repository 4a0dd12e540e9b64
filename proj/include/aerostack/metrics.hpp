#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "aerostack/error.hpp"

namespace aerostack {

namespace detail {

inline void require_pairs(std::span<const double> a, std::span<const double> b, std::size_t min_len,
                          const char* what) {
    if (a.size() != b.size()) {
        fail(ErrorKind::LengthMismatch, std::string(what) + ": lengths " + std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()));
    }
    if (a.size() < min_len) {
        fail(ErrorKind::EmptyInput, std::string(what) + " needs at least " + std::to_string(min_len) + " pairs");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) fail(ErrorKind::NonFinite, std::string(what) + ": non-finite input");
    }
}

}  // namespace detail

inline double rmse(std::span<const double> pred, std::span<const double> obs) {
    detail::require_pairs(pred, obs, 1, "rmse");
    double ss = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ss += (pred[i] - obs[i]) * (pred[i] - obs[i]);
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

/// 1 - SS_res / SS_tot, SS_tot taken about the observation mean. Can be
/// negative.
inline double r_squared(std::span<const double> pred, std::span<const double> obs) {
    detail::require_pairs(pred, obs, 2, "r_squared");
    const double mean = std::accumulate(obs.begin(), obs.end(), 0.0) / static_cast<double>(obs.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        ss_res += (obs[i] - pred[i]) * (obs[i] - pred[i]);
        ss_tot += (obs[i] - mean) * (obs[i] - mean);
    }
    if (ss_tot == 0) fail(ErrorKind::ZeroVariance, "r_squared: observations are constant");
    return 1.0 - ss_res / ss_tot;
}

/// 1-based ranks; tied values share the average of their positions.
inline std::vector<double> fractional_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    detail::require_pairs(x, y, 2, "pearson");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) fail(ErrorKind::ZeroVariance, "correlation of a constant vector");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Pearson correlation of average-tie ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    detail::require_pairs(x, y, 2, "spearman");
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    return pearson(rx, ry);
}

}  // namespace aerostack
