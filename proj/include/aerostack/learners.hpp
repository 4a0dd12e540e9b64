#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aerostack/error.hpp"
#include "aerostack/features.hpp"
#include "aerostack/parallel.hpp"
#include "aerostack/tree.hpp"

namespace aerostack {

enum class ModelKind { rf, gbt, svr, glm };

constexpr std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::rf: return "rf";
        case ModelKind::gbt: return "gbt";
        case ModelKind::svr: return "svr";
        case ModelKind::glm: return "glm";
    }
    return "?";
}

inline std::optional<ModelKind> model_kind_from_string(std::string_view s) {
    if (s == "rf") return ModelKind::rf;
    if (s == "gbt") return ModelKind::gbt;
    if (s == "svr") return ModelKind::svr;
    if (s == "glm") return ModelKind::glm;
    return std::nullopt;
}

struct RfParams {
    int n_trees = 100;
    int mtry = 0;        // 0: ceil(p / 3)
    int min_leaf = 2;
    int max_depth = -1;  // -1: unlimited
    bool bootstrap = true;

    bool operator==(const RfParams&) const = default;
};

struct GbtParams {
    int n_rounds = 200;
    double learning_rate = 0.05;
    int max_depth = 3;
    int min_leaf = 5;
    double l2_leaf = 1.0;

    bool operator==(const GbtParams&) const = default;
};

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;
    int max_epochs = 500;
    double tol = 1e-5;

    bool operator==(const SvrParams&) const = default;
};

struct GlmParams {
    double ridge_lambda = 1e-6;

    bool operator==(const GlmParams&) const = default;
};

namespace detail {

inline void require_fit_input(const FeatureMatrix& X) {
    if (X.empty()) fail(ErrorKind::EmptyInput, "cannot fit on an empty matrix");
    if (X.cols() == 0) fail(ErrorKind::EmptyInput, "cannot fit without features");
    require_finite(X);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random forest

class RandomForest {
public:
    RandomForest(std::vector<std::string> names, std::vector<RegressionTree> trees, double y_min, double y_max)
        : names_(std::move(names)), trees_(std::move(trees)), y_min_(y_min), y_max_(y_max) {}

    std::vector<double> predict(const FeatureMatrix& X) const {
        const auto cols = resolve_columns(names_, X);
        std::vector<double> out(X.rows(), 0.0);
        for (std::size_t r = 0; r < X.rows(); ++r) {
            double s = 0;
            for (const auto& t : trees_) s += t.predict_row(X.x, static_cast<Eigen::Index>(r), cols);
            out[r] = s / static_cast<double>(trees_.size());
        }
        return out;
    }

    const std::vector<std::string>& feature_names() const { return names_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

private:
    std::vector<std::string> names_;
    std::vector<RegressionTree> trees_;
    double y_min_;
    double y_max_;
};

/// Tree t draws its bootstrap sample and feature subsets from seed + t, so
/// the forest does not depend on how trees are spread over threads.
inline RandomForest fit_random_forest(const FeatureMatrix& X, const RfParams& params, std::uint64_t seed) {
    detail::require_fit_input(X);
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    const std::size_t mtry = params.mtry > 0 ? static_cast<std::size_t>(params.mtry) : (p + 2) / 3;
    if (params.n_trees < 1) fail(ErrorKind::InvalidArgument, "rf.n_trees must be >= 1");
    if (mtry > p) fail(ErrorKind::InvalidArgument, "rf.mtry exceeds the number of features");
    if (params.min_leaf < 1) fail(ErrorKind::InvalidArgument, "rf.min_leaf must be >= 1");

    const TreeGrowth growth{params.max_depth, static_cast<std::size_t>(params.min_leaf), 0.0, mtry};
    const std::vector<double> response(X.y.data(), X.y.data() + X.y.size());
    std::vector<RegressionTree> trees(static_cast<std::size_t>(params.n_trees));

    parallel_for(trees.size(), [&](std::size_t t) {
        Rng rng(seed + t);
        std::vector<std::size_t> sample(n);
        if (params.bootstrap) {
            std::uniform_int_distribution<std::size_t> draw(0, n - 1);
            for (auto& s : sample) s = draw(rng);
        } else {
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        TreeBuilder builder(X.x, std::move(sample));
        trees[t] = builder.grow(response, growth, &rng);
    });
    return RandomForest(X.names, std::move(trees), X.y.minCoeff(), X.y.maxCoeff());
}

// ---------------------------------------------------------------------------
// Gradient-boosted trees

class GradientBoosting {
public:
    GradientBoosting(std::vector<std::string> names, double base_score, double learning_rate,
                     std::vector<RegressionTree> trees, double y_min, double y_max)
        : names_(std::move(names)),
          base_score_(base_score),
          learning_rate_(learning_rate),
          trees_(std::move(trees)),
          y_min_(y_min),
          y_max_(y_max) {}

    std::vector<double> predict(const FeatureMatrix& X) const {
        const auto cols = resolve_columns(names_, X);
        std::vector<double> out(X.rows(), base_score_);
        for (std::size_t r = 0; r < X.rows(); ++r) {
            for (const auto& t : trees_) {
                out[r] += learning_rate_ * t.predict_row(X.x, static_cast<Eigen::Index>(r), cols);
            }
        }
        return out;
    }

    const std::vector<std::string>& feature_names() const { return names_; }
    double base_score() const { return base_score_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

private:
    std::vector<std::string> names_;
    double base_score_;
    double learning_rate_;
    std::vector<RegressionTree> trees_;
    double y_min_;
    double y_max_;
};

/// Squared-loss boosting with second-order leaf weights: g_i = f(x_i) - y_i,
/// h_i = 1, leaf weight -G / (H + l2_leaf). Base score is the target mean.
inline GradientBoosting fit_gradient_boosting(const FeatureMatrix& X, const GbtParams& params) {
    detail::require_fit_input(X);
    if (params.n_rounds < 0) fail(ErrorKind::InvalidArgument, "gbt.n_rounds must be >= 0");
    if (params.learning_rate < 0) fail(ErrorKind::InvalidArgument, "gbt.learning_rate must be >= 0");
    if (params.l2_leaf < 0) fail(ErrorKind::InvalidArgument, "gbt.l2_leaf must be >= 0");
    if (params.min_leaf < 1) fail(ErrorKind::InvalidArgument, "gbt.min_leaf must be >= 1");

    const std::size_t n = X.rows();
    const double base = X.y.mean();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const TreeBuilder builder(X.x, std::move(all));
    const TreeGrowth growth{params.max_depth, static_cast<std::size_t>(params.min_leaf), params.l2_leaf, 0};
    const std::vector<Eigen::Index> identity = [&] {
        std::vector<Eigen::Index> v(X.cols());
        std::iota(v.begin(), v.end(), Eigen::Index{0});
        return v;
    }();

    std::vector<double> fitted(n, base);
    std::vector<double> residual(n);
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_rounds));
    for (int round = 0; round < params.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = X.y(static_cast<Eigen::Index>(i)) - fitted[i];
        trees.push_back(builder.grow(residual, growth, nullptr));
        const auto& tree = trees.back();
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] += params.learning_rate * tree.predict_row(X.x, static_cast<Eigen::Index>(i), identity);
        }
    }
    return GradientBoosting(X.names, base, params.learning_rate, std::move(trees), X.y.minCoeff(), X.y.maxCoeff());
}

// ---------------------------------------------------------------------------
// Linear epsilon-insensitive SVR

class LinearSvr {
public:
    LinearSvr(Standardizer scaler, Eigen::VectorXd weights, double intercept, double y_min, double y_max)
        : scaler_(std::move(scaler)), w_(std::move(weights)), b_(intercept), y_min_(y_min), y_max_(y_max) {}

    std::vector<double> predict(const FeatureMatrix& X) const {
        const auto cols = resolve_columns(scaler_.columns, X);
        std::vector<double> out(X.rows(), b_);
        for (std::size_t r = 0; r < X.rows(); ++r) {
            double s = b_;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                s += w_(static_cast<Eigen::Index>(j)) *
                     (X.x(static_cast<Eigen::Index>(r), cols[j]) - scaler_.mean[j]) / scaler_.sd[j];
            }
            out[r] = s;
        }
        return out;
    }

    const std::vector<std::string>& feature_names() const { return scaler_.columns; }
    /// Weights on standardized features.
    const Eigen::VectorXd& standardized_weights() const { return w_; }
    /// Weights and intercept on the original feature scale.
    Eigen::VectorXd weights() const {
        Eigen::VectorXd w(w_.size());
        for (Eigen::Index j = 0; j < w_.size(); ++j) w(j) = w_(j) / scaler_.sd[static_cast<std::size_t>(j)];
        return w;
    }
    double intercept() const {
        double b = b_;
        for (Eigen::Index j = 0; j < w_.size(); ++j) {
            b -= w_(j) * scaler_.mean[static_cast<std::size_t>(j)] / scaler_.sd[static_cast<std::size_t>(j)];
        }
        return b;
    }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

private:
    Standardizer scaler_;
    Eigen::VectorXd w_;
    double b_;
    double y_min_;
    double y_max_;
};

/// Minimizes (1/2)|w|^2 + C * sum max(0, |y - w.z - b| - eps) over
/// standardized features z by coordinate descent on the dual
/// (one coordinate per training row, box -C <= beta_i <= C, cyclic sweeps
/// in a seeded order). The target is centered first and the intercept is
/// carried as a constant unit feature.
inline LinearSvr fit_linear_svr(const FeatureMatrix& X, const SvrParams& params, std::uint64_t seed) {
    detail::require_fit_input(X);
    if (!(params.c > 0)) fail(ErrorKind::InvalidArgument, "svr.c must be > 0");
    if (params.epsilon < 0) fail(ErrorKind::InvalidArgument, "svr.epsilon must be >= 0");
    if (params.max_epochs < 1) fail(ErrorKind::InvalidArgument, "svr.max_epochs must be >= 1");

    Standardizer scaler = fit_standardizer(X);
    const FeatureMatrix Z = scaler.apply(X);
    const auto n = static_cast<Eigen::Index>(Z.rows());
    const auto p = static_cast<Eigen::Index>(Z.cols());

    // rows = samples, last column = bias feature
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A(n, p + 1);
    A.leftCols(p) = Z.x;
    A.col(p).setOnes();
    const double y_center = X.y.mean();
    const Eigen::VectorXd y = X.y.array() - y_center;
    const double C = params.c;
    const double eps = params.epsilon;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p + 1);
    Eigen::VectorXd q_diag = A.rowwise().squaredNorm();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(seed);
    double first_violation = -1;

    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double max_violation = 0;
        for (Eigen::Index i : order) {
            const double G = A.row(i).dot(w) - y(i);
            const double Gp = G + eps;
            const double Gn = G - eps;
            const double b = beta(i);
            double violation = 0;
            if (b == 0) {
                if (Gp < 0) violation = -Gp;
                else if (Gn > 0) violation = Gn;
            } else if (b >= C) {
                if (Gp > 0) violation = Gp;
            } else if (b <= -C) {
                if (Gn < 0) violation = -Gn;
            } else if (b > 0) {
                violation = std::abs(Gp);
            } else {
                violation = std::abs(Gn);
            }
            max_violation = std::max(max_violation, violation);
            if (violation == 0) continue;

            const double H = q_diag(i);
            double d;
            if (Gp < H * b) d = -Gp / H;
            else if (Gn > H * b) d = -Gn / H;
            else d = -b;
            const double updated = std::clamp(b + d, -C, C);
            const double delta = updated - b;
            if (delta != 0) {
                beta(i) = updated;
                w.noalias() += delta * A.row(i).transpose();
            }
        }
        if (first_violation < 0) first_violation = max_violation;
        if (max_violation <= params.tol * std::max(1.0, first_violation)) break;
    }

    return LinearSvr(std::move(scaler), w.head(p), y_center + w(p), X.y.minCoeff(), X.y.maxCoeff());
}

// ---------------------------------------------------------------------------
// Ridge GLM (Gaussian family, identity link)

class RidgeGlm {
public:
    RidgeGlm(std::vector<std::string> names, Eigen::VectorXd coefficients, double intercept)
        : names_(std::move(names)), coef_(std::move(coefficients)), intercept_(intercept) {}

    std::vector<double> predict(const FeatureMatrix& X) const {
        const auto cols = resolve_columns(names_, X);
        std::vector<double> out(X.rows());
        for (std::size_t r = 0; r < X.rows(); ++r) {
            double s = intercept_;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                s += coef_(static_cast<Eigen::Index>(j)) * X.x(static_cast<Eigen::Index>(r), cols[j]);
            }
            out[r] = s;
        }
        return out;
    }

    const std::vector<std::string>& feature_names() const { return names_; }
    const Eigen::VectorXd& coefficients() const { return coef_; }
    double intercept() const { return intercept_; }

private:
    std::vector<std::string> names_;
    Eigen::VectorXd coef_;
    double intercept_;
};

/// Solves (Z'Z + lambda I) beta = Z'(y - ybar) on standardized, centered
/// columns Z; the intercept is unpenalized. Coefficients are reported on the
/// original scale. With lambda = 0 a rank-deficient Z is an error.
inline RidgeGlm fit_ridge_glm(const FeatureMatrix& X, const GlmParams& params) {
    detail::require_fit_input(X);
    if (params.ridge_lambda < 0) fail(ErrorKind::InvalidArgument, "glm.ridge_lambda must be >= 0");

    const Standardizer scaler = fit_standardizer(X);
    const auto p = static_cast<Eigen::Index>(X.cols());
    Eigen::MatrixXd Z(X.x.rows(), p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        Z.col(j) = (X.x.col(j).array() - scaler.mean[sj]) / scaler.sd[sj];
    }
    const double y_mean = X.y.mean();
    const Eigen::VectorXd yc = X.y.array() - y_mean;

    Eigen::VectorXd beta;
    if (params.ridge_lambda == 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
        qr.setThreshold(1e-12);
        if (qr.rank() < p) {
            fail(ErrorKind::DegenerateMatrix, "design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                                  " < " + std::to_string(p) + ") with ridge_lambda = 0");
        }
        beta = qr.solve(yc);
    } else {
        Eigen::MatrixXd gram = Z.transpose() * Z;
        gram.diagonal().array() += params.ridge_lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) fail(ErrorKind::DegenerateMatrix, "ridge system is not positive definite");
        beta = llt.solve(Z.transpose() * yc);
    }
    if (!beta.allFinite()) fail(ErrorKind::DegenerateMatrix, "ridge solution is not finite");

    Eigen::VectorXd coef(p);
    double intercept = y_mean;
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        coef(j) = beta(j) / scaler.sd[sj];
        intercept -= coef(j) * scaler.mean[sj];
    }
    return RidgeGlm(X.names, std::move(coef), intercept);
}

// ---------------------------------------------------------------------------
// Common contract

using ModelParamsBlock = std::variant<RfParams, GbtParams, SvrParams, GlmParams>;

class FittedRegressor;

struct RegressorSpec {
    ModelKind kind = ModelKind::rf;
    ModelParamsBlock params = RfParams{};
    std::uint64_t seed = 42;

    static RegressorSpec rf(RfParams p = {}, std::uint64_t seed = 42) { return {ModelKind::rf, p, seed}; }
    static RegressorSpec gbt(GbtParams p = {}, std::uint64_t seed = 42) { return {ModelKind::gbt, p, seed}; }
    static RegressorSpec svr(SvrParams p = {}, std::uint64_t seed = 42) { return {ModelKind::svr, p, seed}; }
    static RegressorSpec glm(GlmParams p = {}, std::uint64_t seed = 42) { return {ModelKind::glm, p, seed}; }

    std::string name() const { return std::string(to_string(kind)); }

    FittedRegressor fit(const FeatureMatrix& X) const;

    bool operator==(const RegressorSpec&) const = default;
};

class FittedRegressor {
public:
    using Model = std::variant<RandomForest, GradientBoosting, LinearSvr, RidgeGlm>;

    explicit FittedRegressor(Model m) : model_(std::move(m)) {}

    ModelKind kind() const {
        return std::visit(
            [](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, RandomForest>) return ModelKind::rf;
                else if constexpr (std::is_same_v<T, GradientBoosting>) return ModelKind::gbt;
                else if constexpr (std::is_same_v<T, LinearSvr>) return ModelKind::svr;
                else return ModelKind::glm;
            },
            model_);
    }

    std::string name() const { return std::string(to_string(kind())); }

    /// Columns are matched by name; X may carry extra columns.
    std::vector<double> predict(const FeatureMatrix& X) const {
        return std::visit([&](const auto& m) { return m.predict(X); }, model_);
    }

    const std::vector<std::string>& feature_names() const {
        return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.feature_names(); }, model_);
    }

    const Model& model() const { return model_; }

    template <class T>
    const T& as() const {
        return std::get<T>(model_);
    }

private:
    Model model_;
};

inline FittedRegressor fit(const RegressorSpec& spec, const FeatureMatrix& X) {
    auto expect = [&](auto* tag) -> const auto& {
        using P = std::remove_pointer_t<decltype(tag)>;
        const auto* p = std::get_if<P>(&spec.params);
        if (!p) fail(ErrorKind::InvalidArgument, "parameter block does not match model kind " + spec.name());
        return *p;
    };
    switch (spec.kind) {
        case ModelKind::rf:
            return FittedRegressor(fit_random_forest(X, expect(static_cast<RfParams*>(nullptr)), spec.seed));
        case ModelKind::gbt:
            return FittedRegressor(fit_gradient_boosting(X, expect(static_cast<GbtParams*>(nullptr))));
        case ModelKind::svr:
            return FittedRegressor(fit_linear_svr(X, expect(static_cast<SvrParams*>(nullptr)), spec.seed));
        case ModelKind::glm:
            return FittedRegressor(fit_ridge_glm(X, expect(static_cast<GlmParams*>(nullptr))));
    }
    fail(ErrorKind::InvalidArgument, "unknown model kind");
}

inline FittedRegressor RegressorSpec::fit(const FeatureMatrix& X) const { return aerostack::fit(*this, X); }

inline std::vector<double> predict(const FittedRegressor& model, const FeatureMatrix& X) { return model.predict(X); }

}  // namespace aerostack
