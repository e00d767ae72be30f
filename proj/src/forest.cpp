#include <cmath>

#include "fairbench/error.hpp"
#include "fairbench/learners.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

void RandomForest::fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                       std::uint64_t seed) {
    validate_training_data(X, y, weights);
    if (config_.n_trees == 0) throw Error("random forest needs at least one tree");
    n_features_ = X.cols();
    trees_.clear();
    trees_.reserve(config_.n_trees);

    CartConfig tree_config = config_.tree;
    if (tree_config.features_per_split == 0) {
        auto mtry = static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols())));
        tree_config.features_per_split = std::max<std::size_t>(1, mtry);
    }

    const std::size_t n = X.rows();
    std::vector<std::size_t> sample(n);
    for (std::size_t t = 0; t < config_.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, t);
        Rng rng(tree_seed);
        for (std::size_t i = 0; i < n; ++i) sample[i] = rng.below(n);
        Cart tree(tree_config);
        // Bootstrap rows may repeat; node growth draws from the same stream.
        tree.fit_rows(X, y, weights, sample, rng.next_u64());
        trees_.push_back(std::move(tree));
    }
    fitted_ = true;
}

std::vector<double> RandomForest::predict_proba(const Matrix& X) const {
    require_fitted();
    check_input_width(X);
    std::vector<double> proba(X.rows(), 0.0);
    for (const Cart& tree : trees_) {
        std::vector<double> tree_proba = tree.predict_proba(X);
        for (std::size_t r = 0; r < proba.size(); ++r) proba[r] += tree_proba[r];
    }
    const double scale = 1.0 / static_cast<double>(trees_.size());
    for (double& p : proba) p *= scale;
    return proba;
}

}  // namespace fairbench
