#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "aerostack/error.hpp"

namespace aerostack {

inline double tricube(double u) {
    if (u >= 1.0) return 0.0;
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

/// Degree-1 local regression. At each x_i the q = ceil(span * n) nearest
/// points are weighted by tricube(|x_j - x_i| / h), h being the q-th
/// smallest distance. When the weighted neighbourhood has no spread in x the
/// fit falls back to the weighted mean.
inline std::vector<double> loess_smooth(std::span<const double> x, std::span<const double> y, double span = 0.2) {
    if (x.size() != y.size()) fail(ErrorKind::LengthMismatch, "loess: x and y differ in length");
    if (x.size() < 2) fail(ErrorKind::EmptyInput, "loess needs at least 2 points");
    if (!(span > 0 && span <= 1)) fail(ErrorKind::InvalidArgument, "loess span must lie in (0, 1]");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorKind::NonFinite, "loess: non-finite input");
    }
    const std::size_t n = x.size();
    const std::size_t q = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(span * static_cast<double>(n) - 1e-9)), 1, n);

    std::vector<double> fitted(n);
    std::vector<double> dist(n);
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[j] = std::abs(x[j] - x[i]);
        sorted = dist;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q - 1), sorted.end());
        const double h = sorted[q - 1];

        double sw = 0, swx = 0, swy = 0;
        std::vector<double> w(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (h > 0) {
                w[j] = tricube(dist[j] / h);
            } else {
                w[j] = dist[j] == 0 ? 1.0 : 0.0;
            }
            sw += w[j];
            swx += w[j] * (x[j] - x[i]);
            swy += w[j] * y[j];
        }
        if (sw <= 0) {
            // every neighbour sits exactly at distance h; use them uniformly
            for (std::size_t j = 0; j < n; ++j) {
                w[j] = dist[j] <= h ? 1.0 : 0.0;
                sw += w[j];
                swx += w[j] * (x[j] - x[i]);
                swy += w[j] * y[j];
            }
        }
        const double mx = swx / sw;
        const double my = swy / sw;
        double sxx = 0, sxy = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (w[j] == 0) continue;
            const double dx = (x[j] - x[i]) - mx;
            sxx += w[j] * dx * dx;
            sxy += w[j] * dx * (y[j] - my);
        }
        // local line in u = x - x_i evaluated at u = 0
        const double spread = h > 0 ? h * h * sw : 0.0;
        if (sxx <= 1e-12 * spread || sxx == 0) {
            fitted[i] = my;
        } else {
            const double slope = sxy / sxx;
            fitted[i] = my - slope * mx;
        }
    }
    return fitted;
}

}  // namespace aerostack
