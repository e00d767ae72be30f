#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairbench/error.hpp"
#include "fairbench/learners.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

namespace {

struct Sample {
    double value = 0.0;
    double weight = 0.0;
    int label = 0;
};

double gini_term(double w1, double total) {
    if (total <= 0.0) return 0.0;
    double p1 = w1 / total;
    double p0 = 1.0 - p1;
    return 1.0 - p1 * p1 - p0 * p0;
}

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

}  // namespace

void Cart::fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
               std::uint64_t seed) {
    validate_training_data(X, y, weights);
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    fit_rows(X, y, weights, rows, seed);
}

void Cart::fit_rows(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                    std::span<const std::size_t> rows, std::uint64_t seed) {
    if (rows.empty()) throw Error("cart: empty training sample");
    nodes_.clear();
    n_features_ = X.cols();
    fitted_ = false;

    const std::size_t mtry =
        config_.features_per_split == 0
            ? X.cols()
            : std::min<std::size_t>(config_.features_per_split, X.cols());
    Rng rng(seed);

    auto weight_of = [&](std::size_t row) { return weights.empty() ? 1.0 : weights[row]; };

    struct Frame {
        int node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };

    std::vector<Frame> stack;
    nodes_.emplace_back();
    stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});

    std::vector<std::size_t> feature_pool(X.cols());
    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    std::vector<Sample> samples;

    while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        stack.pop_back();
        Node& node = nodes_[static_cast<std::size_t>(frame.node)];

        double w_total = 0.0, w1 = 0.0;
        for (std::size_t row : frame.rows) {
            double w = weight_of(row);
            w_total += w;
            if (y[row] == 1) w1 += w;
        }
        node.support = frame.rows.size();
        node.p1 = w_total > 0.0 ? w1 / w_total : 0.5;

        const bool pure = w1 <= 0.0 || w1 >= w_total;
        const bool depth_capped = config_.max_depth > 0 && frame.depth >= config_.max_depth;
        if (pure || depth_capped || w_total <= 0.0 ||
            frame.rows.size() < 2 * config_.min_leaf || frame.rows.size() < 2) {
            continue;  // leaf (feature stays -1)
        }

        // Candidate features: all, or a uniform random subset for forests.
        std::span<const std::size_t> candidates;
        if (mtry == X.cols()) {
            candidates = feature_pool;
        } else {
            // Partial Fisher-Yates: first mtry entries form the sample.
            for (std::size_t i = 0; i < mtry; ++i) {
                std::size_t j = i + rng.below(feature_pool.size() - i);
                std::swap(feature_pool[i], feature_pool[j]);
            }
            candidates = std::span<const std::size_t>(feature_pool.data(), mtry);
        }

        BestSplit best;
        std::vector<std::size_t> sorted_candidates(candidates.begin(), candidates.end());
        std::sort(sorted_candidates.begin(), sorted_candidates.end());
        for (std::size_t feature : sorted_candidates) {
            samples.clear();
            samples.reserve(frame.rows.size());
            for (std::size_t row : frame.rows)
                samples.push_back({X(row, feature), weight_of(row), y[row]});
            std::sort(samples.begin(), samples.end(),
                      [](const Sample& a, const Sample& b) { return a.value < b.value; });

            double left_w = 0.0, left_w1 = 0.0;
            std::size_t left_n = 0;
            for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
                left_w += samples[i].weight;
                if (samples[i].label == 1) left_w1 += samples[i].weight;
                ++left_n;
                if (samples[i].value == samples[i + 1].value) continue;
                if (left_n < config_.min_leaf || samples.size() - left_n < config_.min_leaf)
                    continue;
                const double right_w = w_total - left_w;
                const double right_w1 = w1 - left_w1;
                const double score = (left_w * gini_term(left_w1, left_w) +
                                      right_w * gini_term(right_w1, right_w)) /
                                     w_total;
                if (score < best.score) {
                    best.found = true;
                    best.feature = feature;
                    best.threshold = samples[i].value + (samples[i + 1].value - samples[i].value) / 2.0;
                    best.score = score;
                }
            }
        }

        if (!best.found) continue;  // e.g. all candidate features constant

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t row : frame.rows) {
            if (X(row, best.feature) <= best.threshold) left_rows.push_back(row);
            else right_rows.push_back(row);
        }
        if (left_rows.empty() || right_rows.empty()) continue;

        const int left_index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        const int right_index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        // nodes_ may have reallocated; re-reference.
        Node& parent = nodes_[static_cast<std::size_t>(frame.node)];
        parent.feature = static_cast<int>(best.feature);
        parent.threshold = best.threshold;
        parent.left = left_index;
        parent.right = right_index;

        stack.push_back({right_index, std::move(right_rows), frame.depth + 1});
        stack.push_back({left_index, std::move(left_rows), frame.depth + 1});
    }

    fitted_ = true;
}

std::vector<double> Cart::predict_proba(const Matrix& X) const {
    require_fitted();
    check_input_width(X);
    std::vector<double> proba(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        std::size_t index = 0;
        while (!nodes_[index].is_leaf()) {
            const Node& node = nodes_[index];
            index = static_cast<std::size_t>(
                X(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left
                                                                               : node.right);
        }
        proba[r] = nodes_[index].p1;
    }
    return proba;
}

}  // namespace fairbench
