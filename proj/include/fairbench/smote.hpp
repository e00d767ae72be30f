#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fairbench/matrix.hpp"
#include "fairbench/tabular.hpp"

namespace fairbench {

struct SmoteConfig {
    std::size_t k_neighbors = 5;  // clamped to minority size - 1 when larger
    std::uint64_t seed = 0;
};

/// Oversample the minority class to the majority count. Synthetic rows are
/// x + u * (n - x) for a minority row x, one of its k nearest minority
/// neighbours n (Euclidean, ties by row index) and a single u ~ U[0,1) per
/// row. One-hot groups, when given, are repaired to valid one-hot by argmax
/// (ties to the lowest index). Original rows come first, unchanged.
std::pair<Matrix, std::vector<int>> smote_balance(const Matrix& X, std::span<const int> labels,
                                                  const SmoteConfig& config,
                                                  std::span<const OneHotGroup> one_hot_groups = {});

/// Precomputed-neighbour variant for repeated draws over the same data
/// (the xFAIR budget loop): neighbour tables are built once, each sample()
/// call only consumes randomness.
class SmoteSampler {
public:
    SmoteSampler(const Matrix& X, std::span<const int> labels, std::size_t k_neighbors,
                 std::span<const OneHotGroup> one_hot_groups = {});

    std::pair<Matrix, std::vector<int>> sample(std::uint64_t seed) const;

private:
    const Matrix& X_;
    std::vector<int> labels_;
    std::vector<std::size_t> minority_rows_;
    std::vector<std::vector<std::size_t>> neighbors_;  // per minority row
    std::vector<OneHotGroup> one_hot_groups_;
    std::size_t deficit_ = 0;
    int minority_label_ = 0;
};

/// Set each one-hot block to exactly one 1 at its largest coordinate
/// (ties to the lowest index).
void repair_one_hot(std::span<double> row, std::span<const OneHotGroup> groups);

}  // namespace fairbench
