#include "fairbench/smote.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

void repair_one_hot(std::span<double> row, std::span<const OneHotGroup> groups) {
    for (const auto& group : groups) {
        if (group.column_indices.empty()) continue;
        std::size_t best = group.column_indices.front();
        for (std::size_t index : group.column_indices)
            if (row[index] > row[best]) best = index;  // strict keeps lowest on ties
        for (std::size_t index : group.column_indices) row[index] = 0.0;
        row[best] = 1.0;
    }
}

SmoteSampler::SmoteSampler(const Matrix& X, std::span<const int> labels, std::size_t k_neighbors,
                           std::span<const OneHotGroup> one_hot_groups)
    : X_(X),
      labels_(labels.begin(), labels.end()),
      one_hot_groups_(one_hot_groups.begin(), one_hot_groups.end()) {
    if (X.rows() == 0) throw Error("smote: empty input");
    if (X.rows() != labels.size()) throw Error("smote: labels length mismatch");

    std::size_t count1 = 0;
    for (int label : labels_) {
        if (label != 0 && label != 1) throw Error("smote: labels must be 0 or 1");
        if (label == 1) ++count1;
    }
    const std::size_t count0 = labels_.size() - count1;
    if (count0 == 0 || count1 == 0) throw Error("smote: input contains a single class");

    minority_label_ = count1 < count0 ? 1 : 0;
    const std::size_t minority = std::min(count0, count1);
    const std::size_t majority = std::max(count0, count1);
    deficit_ = majority - minority;

    for (std::size_t r = 0; r < labels_.size(); ++r)
        if (labels_[r] == minority_label_) minority_rows_.push_back(r);

    if (deficit_ == 0) return;  // already balanced, no neighbour table needed

    std::size_t k = k_neighbors;
    if (k >= minority && minority > 1) {
        k = minority - 1;
        std::cerr << "fairbench: smote: k_neighbors clamped to " << k
                  << " (minority class has " << minority << " rows)\n";
    }
    if (minority == 1) k = 0;  // lone minority row duplicates itself

    neighbors_.resize(minority_rows_.size());
    if (k == 0) return;

    // Brute-force k nearest within the minority class, ties by row index.
    std::vector<std::pair<double, std::size_t>> distances;
    for (std::size_t i = 0; i < minority_rows_.size(); ++i) {
        distances.clear();
        auto a = X_.row(minority_rows_[i]);
        for (std::size_t j = 0; j < minority_rows_.size(); ++j) {
            if (j == i) continue;
            auto b = X_.row(minority_rows_[j]);
            double d2 = 0.0;
            for (std::size_t c = 0; c < a.size(); ++c) {
                const double diff = a[c] - b[c];
                d2 += diff * diff;
            }
            distances.emplace_back(d2, minority_rows_[j]);
        }
        std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k),
                          distances.end());
        neighbors_[i].reserve(k);
        for (std::size_t t = 0; t < k; ++t) neighbors_[i].push_back(distances[t].second);
    }
}

std::pair<Matrix, std::vector<int>> SmoteSampler::sample(std::uint64_t seed) const {
    Matrix out = X_;
    std::vector<int> labels = labels_;
    if (deficit_ == 0) return {std::move(out), std::move(labels)};

    Rng rng(seed);
    std::vector<double> synthetic(X_.cols());
    for (std::size_t t = 0; t < deficit_; ++t) {
        const std::size_t pick = t % minority_rows_.size();
        auto x = X_.row(minority_rows_[pick]);
        const auto& pool = neighbors_[pick];
        std::span<const double> n = x;  // self when the class has a single row
        if (!pool.empty()) n = X_.row(pool[rng.below(pool.size())]);
        const double u = rng.uniform();
        for (std::size_t c = 0; c < synthetic.size(); ++c)
            synthetic[c] = x[c] + u * (n[c] - x[c]);
        repair_one_hot(synthetic, one_hot_groups_);
        out.append_row(synthetic);
        labels.push_back(minority_label_);
    }
    return {std::move(out), std::move(labels)};
}

std::pair<Matrix, std::vector<int>> smote_balance(const Matrix& X, std::span<const int> labels,
                                                  const SmoteConfig& config,
                                                  std::span<const OneHotGroup> one_hot_groups) {
    if (config.k_neighbors < 1) throw Error("smote: k_neighbors must be at least 1");
    SmoteSampler sampler(X, labels, config.k_neighbors, one_hot_groups);
    return sampler.sample(config.seed);
}

}  // namespace fairbench
