// Generates a small synthetic dataset, fits the three-stage stack on the
// first days and scores it on the last ones.
#include <iostream>

#include "aerostack/aerostack.hpp"

int main() {
    using namespace aerostack;

    SynthConfig sc;
    sc.n_days = 30;
    const SynthData data = generate(sc);

    auto hourly = join_hourly(hourly_aggregate(data.indoor), data.outdoor);
    const FeatureMatrix X = build_feature_matrix(hourly, FeatureSchema{});
    const TestSplit split = split_test(X, 0.1);
    const FeatureMatrix train = X.slice(0, split.first_test_row);
    const FeatureMatrix test = X.slice(split.first_test_row, X.rows());

    StackConfig stack;
    stack.base_specs = {RegressorSpec::rf({.n_trees = 50}), RegressorSpec::gbt(), RegressorSpec::svr()};
    const DemlModel model = fit_deml(stack, train);

    const std::vector<double> obs(test.y.data(), test.y.data() + test.y.size());
    std::cout << "rows: train " << train.rows() << ", test " << test.rows() << '\n';
    for (std::size_t i = 0; i < model.meta_names.size(); ++i) {
        std::cout << "weight[" << model.meta_names[i] << "] = " << model.weights(static_cast<Eigen::Index>(i)) << '\n';
    }
    for (const auto& base : model.bases) {
        std::cout << base.name() << " rmse " << rmse(base.predict(test), obs) << '\n';
    }
    std::cout << "deml rmse " << rmse(model.predict(test), obs) << '\n';
    return 0;
}
