#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "aerostack/ensemble.hpp"
#include "aerostack/error.hpp"
#include "aerostack/features.hpp"
#include "aerostack/metrics.hpp"
#include "aerostack/parallel.hpp"

namespace aerostack {

struct ImportanceEntry {
    std::string feature;
    double mean_rmse_loss = 0;
    double sd_rmse_loss = 0;
    int rank = 0;
};

/// RMSE loss from shuffling each column of X in turn, averaged over
/// `n_perm` shuffles. The model is never refit. Column j is shuffled with a
/// stream derived from (seed, j). Entries come back ranked by mean loss,
/// largest first; ties keep column order.
template <Predictor Model>
std::vector<ImportanceEntry> permutation_importance(const Model& model, const FeatureMatrix& X, int n_perm = 10,
                                                    std::uint64_t seed = 42) {
    if (n_perm < 1) fail(ErrorKind::InvalidArgument, "n_perm must be >= 1");
    if (X.empty()) fail(ErrorKind::EmptyInput, "importance needs a non-empty evaluation matrix");
    const std::vector<double> obs(X.y.data(), X.y.data() + X.y.size());
    const double baseline = rmse(model.predict(X), obs);

    std::vector<ImportanceEntry> entries(X.cols());
    parallel_for(X.cols(), [&](std::size_t j) {
        Rng rng(mix_seed(seed, j));
        FeatureMatrix shuffled = X;
        const auto col = static_cast<Eigen::Index>(j);
        std::vector<double> original(X.rows());
        for (std::size_t r = 0; r < X.rows(); ++r) original[r] = X.x(static_cast<Eigen::Index>(r), col);
        std::vector<double> losses;
        for (int k = 0; k < n_perm; ++k) {
            std::vector<double> perm = original;
            std::shuffle(perm.begin(), perm.end(), rng);
            for (std::size_t r = 0; r < X.rows(); ++r) shuffled.x(static_cast<Eigen::Index>(r), col) = perm[r];
            losses.push_back(rmse(model.predict(shuffled), obs) - baseline);
        }
        const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(n_perm);
        double ss = 0;
        for (double l : losses) ss += (l - mean) * (l - mean);
        entries[j].feature = X.names[j];
        entries[j].mean_rmse_loss = mean;
        entries[j].sd_rmse_loss = n_perm > 1 ? std::sqrt(ss / static_cast<double>(n_perm - 1)) : 0.0;
    });

    std::stable_sort(entries.begin(), entries.end(),
                     [](const ImportanceEntry& a, const ImportanceEntry& b) { return a.mean_rmse_loss > b.mean_rmse_loss; });
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i + 1);
    return entries;
}

}  // namespace aerostack
