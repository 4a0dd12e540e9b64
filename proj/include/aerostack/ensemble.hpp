#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aerostack/error.hpp"
#include "aerostack/features.hpp"
#include "aerostack/learners.hpp"
#include "aerostack/nnls.hpp"
#include "aerostack/parallel.hpp"

namespace aerostack {

template <class M>
concept Predictor = requires(const M& m, const FeatureMatrix& X) {
    { m.predict(X) } -> std::convertible_to<std::vector<double>>;
};

/// Anything with `fit(FeatureMatrix) -> Predictor`.
template <class L>
concept Learner = requires(const L& l, const FeatureMatrix& X) {
    { l.fit(X) } -> Predictor;
};

template <Learner L>
using fitted_t = decltype(std::declval<const L&>().fit(std::declval<const FeatureMatrix&>()));

template <class L>
std::string learner_name(const L& learner, std::size_t index) {
    if constexpr (requires { { learner.name() } -> std::convertible_to<std::string>; }) {
        return learner.name();
    } else {
        return "model" + std::to_string(index);
    }
}

/// Bookkeeping of one out-of-fold pass: which rows trained each fold model
/// and which rows it predicted.
struct FoldRecord {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> predict_rows;
};

struct OofAudit {
    std::string label;
    std::vector<FoldRecord> folds;
};

/// Throws LeakageDetected if any fold model was trained on a row it predicts.
inline void assert_no_leakage(const OofAudit& audit) {
    for (std::size_t f = 0; f < audit.folds.size(); ++f) {
        const auto& fold = audit.folds[f];
        const std::set<std::size_t> trained(fold.train_rows.begin(), fold.train_rows.end());
        for (std::size_t r : fold.predict_rows) {
            if (trained.count(r)) {
                fail(ErrorKind::LeakageDetected, audit.label + ": fold " + std::to_string(f) +
                                                     " predicts row " + std::to_string(r) + " it was trained on");
            }
        }
    }
}

/// Splits [0, n) into `folds` contiguous blocks of near-equal size; the
/// first n % folds blocks get one extra row.
inline std::vector<std::pair<std::size_t, std::size_t>> contiguous_blocks(std::size_t n, std::size_t folds) {
    if (folds < 2) fail(ErrorKind::InvalidArgument, "out-of-fold prediction needs at least 2 folds");
    if (n < folds) {
        fail(ErrorKind::TooFewRows, std::to_string(n) + " rows cannot fill " + std::to_string(folds) + " folds");
    }
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    const std::size_t base = n / folds;
    const std::size_t extra = n % folds;
    std::size_t begin = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        blocks.emplace_back(begin, begin + len);
        begin += len;
    }
    return blocks;
}

/// Out-of-fold predictions over contiguous time blocks: each block is
/// predicted by a model fit on every other block.
template <Learner L>
std::vector<double> oof_predictions(const L& learner, const FeatureMatrix& X, std::size_t folds,
                                    OofAudit* audit = nullptr) {
    const auto blocks = contiguous_blocks(X.rows(), folds);
    std::vector<double> out(X.rows(), 0.0);
    std::vector<FoldRecord> records(blocks.size());
    for (std::size_t f = 0; f < blocks.size(); ++f) {
        const auto [begin, end] = blocks[f];
        auto& rec = records[f];
        for (std::size_t r = 0; r < X.rows(); ++r) {
            if (r < begin || r >= end) rec.train_rows.push_back(r);
        }
        for (std::size_t r = begin; r < end; ++r) rec.predict_rows.push_back(r);
        const auto model = learner.fit(X.subset(rec.train_rows));
        const auto pred = model.predict(X.slice(begin, end));
        std::copy(pred.begin(), pred.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    }
    if (audit) audit->folds = std::move(records);
    return out;
}

/// Fitted three-stage stack: base models over raw features, meta models
/// over base predictions, and a nonnegative weight per meta model.
template <Predictor BaseModel, Predictor MetaModel>
struct BasicDemlModel {
    std::vector<std::string> base_names;  // meta-feature column names
    std::vector<BaseModel> bases;
    std::vector<std::string> meta_names;
    std::vector<MetaModel> metas;
    Eigen::VectorXd weights;

    /// Base predictions as a matrix whose columns are named after the bases.
    FeatureMatrix base_matrix(const FeatureMatrix& X) const {
        FeatureMatrix Z;
        Z.names = base_names;
        Z.timestamps = X.timestamps;
        Z.y = X.y;
        Z.x.resize(static_cast<Eigen::Index>(X.rows()), static_cast<Eigen::Index>(bases.size()));
        for (std::size_t b = 0; b < bases.size(); ++b) {
            const auto pred = bases[b].predict(X);
            for (std::size_t r = 0; r < pred.size(); ++r) {
                Z.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) = pred[r];
            }
        }
        return Z;
    }

    std::vector<std::vector<double>> meta_predictions(const FeatureMatrix& X) const {
        const FeatureMatrix Z = base_matrix(X);
        std::vector<std::vector<double>> out;
        out.reserve(metas.size());
        for (const auto& m : metas) out.push_back(m.predict(Z));
        return out;
    }

    /// sum_i w_i * meta_i, no intercept.
    std::vector<double> predict(const FeatureMatrix& X) const { return combine(meta_predictions(X)); }

    std::vector<double> combine(const std::vector<std::vector<double>>& meta) const {
        std::vector<double> out(meta.empty() ? 0 : meta.front().size(), 0.0);
        for (std::size_t r = 0; r < out.size(); ++r) {
            double s = 0;
            for (std::size_t i = 0; i < meta.size(); ++i) s += weights(static_cast<Eigen::Index>(i)) * meta[i][r];
            out[r] = s;
        }
        return out;
    }
};

/// Leakage bookkeeping for one stack fit.
struct StackAudit {
    std::vector<OofAudit> oof;
};

namespace detail {

/// Duplicated names get their position appended: {rf, rf} -> {rf_0, rf_1}.
inline std::vector<std::string> unique_names(const std::vector<std::string>& names) {
    std::vector<std::string> out = names;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (std::count(names.begin(), names.end(), names[i]) > 1) out[i] += "_" + std::to_string(i);
    }
    return out;
}

}  // namespace detail

/// Fits the stack:
///   1. out-of-fold base predictions per base learner, then each base refit
///      on all rows;
///   2. each meta learner fit on the out-of-fold base columns only;
///   3. meta out-of-fold predictions from the same block scheme over those
///      columns, and weights w = nnls(meta OOF, y).
template <Learner BaseLearner, Learner MetaLearner>
auto fit_stack(std::span<const BaseLearner> base_learners, std::span<const MetaLearner> meta_learners,
               std::size_t oof_folds, const FeatureMatrix& X, StackAudit* audit = nullptr)
    -> BasicDemlModel<fitted_t<BaseLearner>, fitted_t<MetaLearner>> {
    using Model = BasicDemlModel<fitted_t<BaseLearner>, fitted_t<MetaLearner>>;
    if (base_learners.empty() || meta_learners.empty()) {
        fail(ErrorKind::InvalidArgument, "stack needs at least one base and one meta learner");
    }
    if (oof_folds < 2) fail(ErrorKind::InvalidArgument, "oof_folds must be >= 2");
    if (X.rows() < 2 * oof_folds) {
        fail(ErrorKind::TooFewRows, "stack fit needs at least " + std::to_string(2 * oof_folds) + " rows, got " +
                                        std::to_string(X.rows()));
    }

    Model model;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < base_learners.size(); ++i) names.push_back(learner_name(base_learners[i], i));
    model.base_names = detail::unique_names(std::move(names));

    // stage 1
    FeatureMatrix Z;
    Z.names = model.base_names;
    Z.timestamps = X.timestamps;
    Z.y = X.y;
    Z.x.resize(static_cast<Eigen::Index>(X.rows()), static_cast<Eigen::Index>(base_learners.size()));
    for (std::size_t b = 0; b < base_learners.size(); ++b) {
        OofAudit oof{"base " + model.base_names[b], {}};
        const auto col = oof_predictions(base_learners[b], X, oof_folds, &oof);
        for (std::size_t r = 0; r < col.size(); ++r) {
            Z.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) = col[r];
        }
        assert_no_leakage(oof);
        if (audit) audit->oof.push_back(std::move(oof));
        model.bases.push_back(base_learners[b].fit(X));
    }

    // stage 2
    names.clear();
    for (std::size_t i = 0; i < meta_learners.size(); ++i) names.push_back(learner_name(meta_learners[i], i));
    model.meta_names = detail::unique_names(std::move(names));
    Eigen::MatrixXd meta_oof(static_cast<Eigen::Index>(X.rows()), static_cast<Eigen::Index>(meta_learners.size()));
    for (std::size_t m = 0; m < meta_learners.size(); ++m) {
        model.metas.push_back(meta_learners[m].fit(Z));
        OofAudit oof{"meta " + model.meta_names[m], {}};
        const auto col = oof_predictions(meta_learners[m], Z, oof_folds, &oof);
        for (std::size_t r = 0; r < col.size(); ++r) {
            meta_oof(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) = col[r];
        }
        assert_no_leakage(oof);
        if (audit) audit->oof.push_back(std::move(oof));
    }

    // stage 3
    model.weights = nnls(meta_oof, X.y);
    return model;
}

/// Ordered base and meta specs plus the out-of-fold scheme.
struct StackConfig {
    std::vector<RegressorSpec> base_specs{RegressorSpec::rf(), RegressorSpec::gbt(), RegressorSpec::svr()};
    std::vector<RegressorSpec> meta_specs{RegressorSpec::rf(), RegressorSpec::glm()};
    std::size_t oof_folds = 5;
    std::uint64_t seed = 42;

    void validate() const {
        if (base_specs.empty()) fail(ErrorKind::InvalidConfig, "stack needs at least one base model");
        if (meta_specs.empty()) fail(ErrorKind::InvalidConfig, "stack needs at least one meta model");
        if (oof_folds < 2) fail(ErrorKind::InvalidConfig, "stack.oof_folds must be >= 2");
    }
};

using DemlModel = BasicDemlModel<FittedRegressor, FittedRegressor>;

inline DemlModel fit_deml(const StackConfig& config, const FeatureMatrix& X, StackAudit* audit = nullptr) {
    config.validate();
    return fit_stack(std::span<const RegressorSpec>(config.base_specs), std::span<const RegressorSpec>(config.meta_specs),
                     config.oof_folds, X, audit);
}

inline std::vector<double> predict_deml(const DemlModel& model, const FeatureMatrix& X) { return model.predict(X); }

}  // namespace aerostack
