#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "aerostack/parallel.hpp"

namespace aerostack {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
};

/// Axis-aligned binary regression tree. Rows with x[feature] <= threshold go
/// left.
class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    /// `columns[j]` is the matrix column holding the tree's feature j.
    double predict_row(const Eigen::MatrixXd& x, Eigen::Index row, std::span<const Eigen::Index> columns) const {
        int at = 0;
        for (;;) {
            const TreeNode& node = nodes_[static_cast<std::size_t>(at)];
            if (node.feature < 0) return node.value;
            const double v = x(row, columns[static_cast<std::size_t>(node.feature)]);
            at = v <= node.threshold ? node.left : node.right;
        }
    }

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t depth() const { return depth_from(0); }

private:
    std::size_t depth_from(int at) const {
        const TreeNode& n = nodes_[static_cast<std::size_t>(at)];
        if (n.feature < 0) return 0;
        return 1 + std::max(depth_from(n.left), depth_from(n.right));
    }

    std::vector<TreeNode> nodes_;
};

struct TreeGrowth {
    int max_depth = -1;          // -1: unlimited, 0: a single leaf
    std::size_t min_leaf = 1;    // minimum samples on each side of a split
    double leaf_l2 = 0.0;        // leaf value = sum / (count + leaf_l2)
    std::size_t mtry = 0;        // features tried per split, 0 = all
};

/// Midpoint between two consecutive distinct values, kept strictly below
/// `hi` so that `x <= threshold` separates them.
inline double split_midpoint(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2;
    return mid < hi ? mid : lo;
}

/// Grows regression trees over a fixed sample of rows. Each feature is sorted
/// once per builder; nodes own a contiguous range of every per-feature order
/// and splitting stably partitions those ranges.
///
/// Candidate splits are midpoints between consecutive distinct values. The
/// split score is S_L^2/(n_L+l2) + S_R^2/(n_R+l2); with l2 = 0 maximizing it
/// is the same as minimizing the children's SSE. Ties go to the lowest
/// feature index and then the lowest threshold.
class TreeBuilder {
public:
    TreeBuilder(const Eigen::MatrixXd& x, std::vector<std::size_t> sample_rows)
        : x_(x), rows_(std::move(sample_rows)) {
        const std::size_t n = rows_.size();
        const auto p = static_cast<std::size_t>(x_.cols());
        sorted_.resize(p);
        for (std::size_t f = 0; f < p; ++f) {
            auto& order = sorted_[f];
            order.resize(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            const auto col = static_cast<Eigen::Index>(f);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x_(static_cast<Eigen::Index>(rows_[a]), col) < x_(static_cast<Eigen::Index>(rows_[b]), col);
            });
        }
    }

    std::size_t sample_size() const { return rows_.size(); }

    /// `response[i]` is the target of matrix row i (indexed by matrix row,
    /// not sample position). `rng` is consulted only when mtry < p.
    RegressionTree grow(std::span<const double> response, const TreeGrowth& growth, Rng* rng) const {
        State st{growth, response, rng, sorted_, {}, std::vector<char>(rows_.size(), 0), {}};
        st.scratch.resize(rows_.size());
        if (rows_.empty()) {
            st.nodes.push_back(TreeNode{});
            return RegressionTree(std::move(st.nodes));
        }
        build(st, 0, rows_.size(), 0);
        return RegressionTree(std::move(st.nodes));
    }

private:
    struct State {
        const TreeGrowth& growth;
        std::span<const double> response;
        Rng* rng;
        std::vector<std::vector<std::size_t>> order;  // per-feature, partitioned in place
        std::vector<TreeNode> nodes;
        std::vector<char> goes_left;
        std::vector<std::size_t> scratch;
    };

    double value_of(const State& st, std::size_t pos) const { return st.response[rows_[pos]]; }

    double feature_value(std::size_t pos, std::size_t f) const {
        return x_(static_cast<Eigen::Index>(rows_[pos]), static_cast<Eigen::Index>(f));
    }

    std::vector<std::size_t> candidate_features(State& st) const {
        const auto p = static_cast<std::size_t>(x_.cols());
        std::vector<std::size_t> feats(p);
        std::iota(feats.begin(), feats.end(), std::size_t{0});
        const std::size_t m = st.growth.mtry == 0 ? p : std::min(st.growth.mtry, p);
        if (m < p && st.rng) {
            // partial Fisher-Yates, then ascending order for the tie-break rule
            for (std::size_t i = 0; i < m; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, p - 1);
                std::swap(feats[i], feats[pick(*st.rng)]);
            }
            feats.resize(m);
            std::sort(feats.begin(), feats.end());
        }
        return feats;
    }

    int build(State& st, std::size_t begin, std::size_t end, int depth) const {
        const std::size_t n = end - begin;
        const double l2 = st.growth.leaf_l2;
        const auto& any_order = st.order[0];
        double sum = 0;
        for (std::size_t i = begin; i < end; ++i) sum += value_of(st, any_order[i]);

        const int index = static_cast<int>(st.nodes.size());
        st.nodes.push_back(TreeNode{});
        st.nodes.back().value = sum / (static_cast<double>(n) + l2);

        const bool depth_left = st.growth.max_depth < 0 || depth < st.growth.max_depth;
        if (!depth_left || n < 2 * st.growth.min_leaf || n < 2) return index;

        const double parent_score = sum * sum / (static_cast<double>(n) + l2);
        double best_score = parent_score;
        std::size_t best_feature = 0;
        double best_threshold = 0;
        bool found = false;

        for (std::size_t f : candidate_features(st)) {
            const auto& order = st.order[f];
            double left_sum = 0;
            for (std::size_t i = begin; i + 1 < end; ++i) {
                left_sum += value_of(st, order[i]);
                const std::size_t n_left = i + 1 - begin;
                const double lo = feature_value(order[i], f);
                const double hi = feature_value(order[i + 1], f);
                if (!(lo < hi)) continue;
                if (n_left < st.growth.min_leaf || n - n_left < st.growth.min_leaf) continue;
                const double right_sum = sum - left_sum;
                const double score = left_sum * left_sum / (static_cast<double>(n_left) + l2) +
                                     right_sum * right_sum / (static_cast<double>(n - n_left) + l2);
                if (score > best_score + 1e-12 * std::abs(best_score)) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = split_midpoint(lo, hi);
                    found = true;
                }
            }
        }
        if (!found) return index;

        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t pos = st.order[0][i];
            st.goes_left[pos] = feature_value(pos, best_feature) <= best_threshold ? 1 : 0;
        }
        std::size_t mid = begin;
        for (auto& order : st.order) {
            auto* out = st.scratch.data();
            std::size_t l = 0, r = 0;
            const std::size_t n_left_total = [&] {
                std::size_t c = 0;
                for (std::size_t i = begin; i < end; ++i) c += static_cast<std::size_t>(st.goes_left[order[i]]);
                return c;
            }();
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t pos = order[i];
                if (st.goes_left[pos]) {
                    out[l++] = pos;
                } else {
                    out[n_left_total + r++] = pos;
                }
            }
            std::copy(out, out + n, order.begin() + static_cast<std::ptrdiff_t>(begin));
            mid = begin + n_left_total;
        }

        st.nodes[static_cast<std::size_t>(index)].feature = static_cast<int>(best_feature);
        st.nodes[static_cast<std::size_t>(index)].threshold = best_threshold;
        const int left = build(st, begin, mid, depth + 1);
        const int right = build(st, mid, end, depth + 1);
        st.nodes[static_cast<std::size_t>(index)].left = left;
        st.nodes[static_cast<std::size_t>(index)].right = right;
        return index;
    }

    const Eigen::MatrixXd& x_;
    std::vector<std::size_t> rows_;
    std::vector<std::vector<std::size_t>> sorted_;
};

}  // namespace aerostack
