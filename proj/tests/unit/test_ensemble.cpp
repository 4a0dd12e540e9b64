#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aerostack/ensemble.hpp"
#include "aerostack/metrics.hpp"
#include "oracles.hpp"

using namespace aerostack;

namespace {

// Small learners with known behaviour, used to plumb values through the stack.
enum class Probe { mean, column, noise, constant };

struct ProbeModel {
    Probe kind;
    double value = 0;
    std::string column;
    std::uint64_t seed = 0;

    std::vector<double> predict(const FeatureMatrix& X) const {
        std::vector<double> out(X.rows(), value);
        if (kind == Probe::column) {
            const auto j = X.column(column);
            if (!j) fail(ErrorKind::SchemaMismatch, "missing " + column);
            for (std::size_t r = 0; r < X.rows(); ++r) out[r] = X.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*j));
        } else if (kind == Probe::noise) {
            for (std::size_t r = 0; r < X.rows(); ++r) {
                const auto hours = static_cast<std::uint64_t>(X.timestamps[r].time_since_epoch() / Hours{1});
                std::mt19937_64 rng(seed * 1000003u + hours);
                out[r] = std::normal_distribution<double>(0.0, 1.0)(rng);
            }
        }
        return out;
    }
};

struct ProbeLearner {
    Probe kind;
    std::string column{};
    double value = 0;
    std::uint64_t seed = 0;

    ProbeModel fit(const FeatureMatrix& X) const {
        ProbeModel m{kind, value, column, seed};
        if (kind == Probe::mean) m.value = X.y.mean();
        return m;
    }
    std::string name() const {
        switch (kind) {
            case Probe::mean: return "mean";
            case Probe::column: return "col_" + column;
            case Probe::noise: return "noise";
            default: return "const";
        }
    }
};

static_assert(Learner<ProbeLearner>);

FeatureMatrix counting_matrix(int n) {
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) x(i, 0) = i, y(i) = i + 1;
    return oracle::make_matrix(x, y);
}

// Target plus a column holding an exact copy of it.
FeatureMatrix with_truth(oracle::Rng& rng, int n) {
    const Eigen::MatrixXd x = oracle::random_matrix(rng, n, 2, -3, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = 10 + 2 * x(i, 0) - x(i, 1) + oracle::uniform(rng, -1, 1);
    return oracle::make_matrix(x, y).with_column("truth", y);
}

}  // namespace

TEST(ContiguousBlocks, EarlierBlocksTakeTheRemainder) {
    const auto b = contiguous_blocks(10, 3);
    ASSERT_EQ(b.size(), 3u);
    EXPECT_EQ(b[0], (std::pair<std::size_t, std::size_t>{0, 4}));
    EXPECT_EQ(b[1], (std::pair<std::size_t, std::size_t>{4, 7}));
    EXPECT_EQ(b[2], (std::pair<std::size_t, std::size_t>{7, 10}));
    EXPECT_THROW(contiguous_blocks(10, 1), Error);
    try {
        contiguous_blocks(3, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewRows);
    }
}

TEST(OofPredictions, MeanLearnerOnCountingTarget) {
    const auto X = counting_matrix(10);
    const auto pred = oof_predictions(ProbeLearner{Probe::mean}, X, 5);
    // block 1 = rows {0,1}, fit on y = 3..10
    EXPECT_DOUBLE_EQ(pred[0], 6.5);
    EXPECT_DOUBLE_EQ(pred[1], 6.5);
    // block 5 = rows {8,9}, fit on y = 1..8
    EXPECT_DOUBLE_EQ(pred[8], 4.5);
    EXPECT_DOUBLE_EQ(pred[9], 4.5);
    // every block: mean of the other 8 values
    for (std::size_t f = 0; f < 5; ++f) {
        double s = 0;
        for (std::size_t r = 0; r < 10; ++r) {
            if (r / 2 != f) s += static_cast<double>(r + 1);
        }
        EXPECT_DOUBLE_EQ(pred[2 * f], s / 8);
    }
}

TEST(OofPredictions, LeaveOneOutOnConstantTarget) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(7, 1);
    const auto X = oracle::make_matrix(x, Eigen::VectorXd::Constant(7, 4.0));
    for (double v : oof_predictions(ProbeLearner{Probe::mean}, X, 7)) EXPECT_EQ(v, 4.0);
}

TEST(OofPredictions, AuditRecordsDisjointRows) {
    const auto X = counting_matrix(23);
    OofAudit audit{"mean", {}};
    oof_predictions(ProbeLearner{Probe::mean}, X, 4, &audit);
    ASSERT_EQ(audit.folds.size(), 4u);
    std::vector<int> seen(23, 0);
    for (const auto& f : audit.folds) {
        EXPECT_EQ(f.train_rows.size() + f.predict_rows.size(), 23u);
        for (auto r : f.predict_rows) ++seen[r];
    }
    for (int c : seen) EXPECT_EQ(c, 1);
    EXPECT_NO_THROW(assert_no_leakage(audit));

    // mutation: a fold model that saw one of its own rows
    audit.folds[2].train_rows.push_back(audit.folds[2].predict_rows.front());
    try {
        assert_no_leakage(audit);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LeakageDetected);
    }
}

TEST(Nnls, HandExamples) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd b(2);
    b << 0.3, 0.7;
    auto w = nnls(I, b);
    EXPECT_NEAR(w(0), 0.3, 1e-12);
    EXPECT_NEAR(w(1), 0.7, 1e-12);

    Eigen::MatrixXd ones(2, 1);
    ones << 1, 1;
    b << 1, 3;
    w = nnls(ones, b);
    EXPECT_NEAR(w(0), 2.0, 1e-12);

    b << -1, 2;
    w = nnls(I, b);
    EXPECT_EQ(w(0), 0.0);
    EXPECT_NEAR(w(1), 2.0, 1e-12);
}

TEST(Nnls, RejectsBadInput) {
    Eigen::MatrixXd a(3, 2);
    a.setOnes();
    Eigen::VectorXd b(2);
    b.setOnes();
    try {
        nnls(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
    a(0, 0) = std::nan("");
    EXPECT_THROW(nnls(a, Eigen::VectorXd::Ones(3)), Error);
}

TEST(Nnls, PropertyKktAndBeatsProjectedOls) {
    oracle::Rng rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = oracle::uniform_int(rng, 1, 5);
        const int n = oracle::uniform_int(rng, 1, 20);
        const Eigen::MatrixXd a = oracle::random_matrix(rng, n, k, -1, 1);
        const Eigen::VectorXd b = oracle::random_matrix(rng, n, 1, -2, 2).col(0);
        const Eigen::VectorXd w = nnls(a, b);
        EXPECT_TRUE(nnls_kkt_holds(a, b, w, nnls_tolerance(a, b))) << "trial " << trial;
        const auto ols = oracle::projected_ols(a, b);
        EXPECT_LE(oracle::residual_norm(a, b, w), oracle::residual_norm(a, b, ols) + 1e-9) << "trial " << trial;
    }
}

TEST(Nnls, PropertyMatchesGridSearch) {
    oracle::Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = oracle::uniform_int(rng, 1, 3);
        const int n = oracle::uniform_int(rng, 1, 20);
        const Eigen::MatrixXd a = oracle::random_matrix(rng, n, k, 0, 1);
        const Eigen::VectorXd b = oracle::random_matrix(rng, n, 1, -1, 3).col(0);
        const Eigen::VectorXd w = nnls(a, b);
        EXPECT_LE(oracle::residual_norm(a, b, w), oracle::grid_min_residual(a, b, 5.0, 5e-2) + 1e-3);
    }
}

TEST(Stack, OracleBasesGiveExactFit) {
    oracle::Rng rng(3);
    const auto X = with_truth(rng, 60);
    const std::vector<ProbeLearner> bases{{Probe::column, "truth"}, {Probe::column, "truth"}};
    const std::vector<ProbeLearner> metas{{Probe::column, "col_truth_0"}, {Probe::column, "col_truth_1"}};
    StackAudit audit;
    const auto model = fit_stack(std::span<const ProbeLearner>(bases), std::span<const ProbeLearner>(metas), 5, X, &audit);
    EXPECT_EQ(model.base_names, (std::vector<std::string>{"col_truth_0", "col_truth_1"}));
    EXPECT_EQ(audit.oof.size(), 4u);
    const auto pred = model.predict(X);
    EXPECT_NEAR(r_squared(pred, oracle::as_vector(X.y)), 1.0, 1e-12);
    EXPECT_NEAR(model.weights.sum(), 1.0, 1e-9);
}

TEST(Stack, NoiseMetaGetsNegligibleWeight) {
    oracle::Rng rng(4);
    const auto X = with_truth(rng, 200);
    const std::vector<ProbeLearner> bases{{Probe::column, "truth"}};
    const std::vector<ProbeLearner> metas{{Probe::column, "col_truth"}, {Probe::noise, "", 0, 17}};
    const auto model = fit_stack(std::span<const ProbeLearner>(bases), std::span<const ProbeLearner>(metas), 5, X);
    EXPECT_LE(model.weights(1), 0.05 * model.weights(0));

    // the 2-d grid agrees that (1, 0) is optimal for this design
    Eigen::MatrixXd a(static_cast<Eigen::Index>(X.rows()), 2);
    a.col(0) = X.y;
    const auto noise = ProbeModel{Probe::noise, 0, "", 17}.predict(X);
    for (std::size_t r = 0; r < X.rows(); ++r) a(static_cast<Eigen::Index>(r), 1) = noise[r];
    EXPECT_LE(oracle::residual_norm(a, X.y, model.weights), oracle::grid_min_residual(a, X.y) + 1e-9);
}

TEST(Stack, SingleBaseSingleGlmMetaIsOneColumnLeastSquares) {
    oracle::Rng rng(5);
    const auto X = with_truth(rng, 80);
    const auto glm = RegressorSpec::glm();
    const StackConfig cfg{{glm}, {glm}, 5, 42};
    const auto model = fit_deml(cfg, X);

    // independent recomputation of the meta OOF column
    auto Z = oracle::make_matrix(oracle::random_matrix(rng, 80, 1), X.y, {"glm"});
    const auto base_oof = oof_predictions(glm, X, 5);
    for (std::size_t r = 0; r < X.rows(); ++r) Z.x(static_cast<Eigen::Index>(r), 0) = base_oof[r];
    const auto g = oof_predictions(glm, Z, 5);
    double gy = 0, gg = 0;
    for (std::size_t r = 0; r < g.size(); ++r) gy += g[r] * X.y(static_cast<Eigen::Index>(r)), gg += g[r] * g[r];
    ASSERT_EQ(model.weights.size(), 1);
    EXPECT_NEAR(model.weights(0), std::max(0.0, gy / gg), 1e-10);

    const auto meta = model.metas[0].predict(model.base_matrix(X));
    const auto pred = predict_deml(model, X);
    for (std::size_t r = 0; r < pred.size(); ++r) EXPECT_DOUBLE_EQ(pred[r], model.weights(0) * meta[r]);
}

TEST(Stack, RejectsTooFewRowsAndEmptyLists) {
    const auto X = counting_matrix(9);
    const std::vector<ProbeLearner> one{{Probe::mean}};
    const std::vector<ProbeLearner> none;
    try {
        fit_stack(std::span<const ProbeLearner>(one), std::span<const ProbeLearner>(one), 5, X);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewRows);
    }
    EXPECT_THROW(fit_stack(std::span<const ProbeLearner>(none), std::span<const ProbeLearner>(one), 2, X), Error);
    StackConfig bad;
    bad.meta_specs.clear();
    EXPECT_THROW(fit_deml(bad, counting_matrix(40)), Error);
}

TEST(PredictDeml, WeightedSumOfMetas) {
    BasicDemlModel<ProbeModel, ProbeModel> model;
    model.base_names = {"b"};
    model.bases = {ProbeModel{Probe::constant, 1.0, {}, 0}};
    model.meta_names = {"m1", "m2"};
    model.metas = {ProbeModel{Probe::constant, 2.0, {}, 0}, ProbeModel{Probe::constant, 4.0, {}, 0}};
    model.weights = Eigen::Vector2d(0.5, 0.5);
    const auto X = counting_matrix(6);
    for (double v : model.predict(X)) EXPECT_EQ(v, 3.0);

    model.weights = Eigen::Vector2d(1.0, 0.0);
    model.metas[0] = ProbeModel{Probe::column, 0, "b", 0};
    for (double v : model.predict(X)) EXPECT_EQ(v, 1.0);
}

TEST(PredictDeml, PropertyLinearInWeightsAndZeroWeightMetaIsInert) {
    oracle::Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = oracle::uniform_int(rng, 2, 4);
        BasicDemlModel<ProbeModel, ProbeModel> model;
        model.base_names = {"b"};
        model.bases = {ProbeModel{Probe::noise, 0, "", static_cast<std::uint64_t>(trial)}};
        for (int i = 0; i < k; ++i) {
            model.meta_names.push_back("m" + std::to_string(i));
            model.metas.push_back(ProbeModel{Probe::noise, 0, "", static_cast<std::uint64_t>(100 + i)});
        }
        const auto X = counting_matrix(15);
        const Eigen::VectorXd w1 = oracle::random_matrix(rng, k, 1, 0, 2).col(0);
        const Eigen::VectorXd w2 = oracle::random_matrix(rng, k, 1, 0, 2).col(0);
        model.weights = w1;
        const auto p1 = model.predict(X);
        model.weights = w2;
        const auto p2 = model.predict(X);
        model.weights = w1 + 3 * w2;
        const auto p3 = model.predict(X);
        for (std::size_t r = 0; r < p1.size(); ++r) EXPECT_NEAR(p3[r], p1[r] + 3 * p2[r], 1e-12);

        model.weights = w1;
        model.weights(k - 1) = 0;
        const auto full = model.predict(X);
        auto reduced = model;
        reduced.metas.pop_back();
        reduced.meta_names.pop_back();
        reduced.weights = w1.head(k - 1);
        EXPECT_EQ(reduced.predict(X), full);
    }
}
