#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "fairbench/learners.hpp"
#include "fairbench/tabular.hpp"

namespace fairbench {

/// Row counts per (protected value, label) subgroup.
struct SubgroupCounts {
    // counts[s][y] with s, y in {0, 1}
    std::size_t counts[2][2] = {{0, 0}, {0, 0}};

    std::size_t total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }
};

SubgroupCounts subgroup_counts(const TabularDataset& train, std::string_view protected_name);

/// Kamiran-Calders reweighing: weight for a row in subgroup (s, y) is
/// P(PA = s) * P(Y = y) / P(PA = s, Y = y), probabilities empirical on train.
/// All four subgroups must be non-empty.
std::vector<double> reweigh(const TabularDataset& train, std::string_view protected_name);

struct FairSmoteConfig {
    double cr = 0.8;  // per-feature crossover probability, in (0, 1]
    double f = 0.8;   // differential weight, in (0, 2]
    std::size_t k_neighbors = 5;
    std::uint64_t seed = 0;
};

/// Oversample every (protected value, label) subgroup to the maximum subgroup
/// count using differential-evolution style synthesis: per feature, with
/// probability cr take p_j + f * (a_j - b_j) clipped to [0,1], else p_j,
/// where p is a subgroup parent and a, b are distinct members of its
/// k-nearest-neighbour pool. One-hot groups repaired by argmax. Original
/// rows are preserved first.
TabularDataset fair_smote_balance(const TabularDataset& train, std::string_view protected_name,
                                  const FairSmoteConfig& config = {});

struct SituationFilterConfig {
    /// Error out when more than this fraction of rows would be dropped.
    double max_drop_fraction = 0.5;
    LearnerKind classifier = LearnerKind::RandomForest;
};

/// Situation-testing removal: fit a classifier on train, flip each row's
/// protected feature, drop rows whose prediction flips.
TabularDataset situation_testing_filter(const TabularDataset& train,
                                        std::string_view protected_name, std::uint64_t seed,
                                        const SituationFilterConfig& config = {});

/// Copy of `test` whose protected column (feature and attribute vector) is a
/// uniform random permutation of the original values.
TabularDataset random_shuffle_protected(const TabularDataset& test,
                                        std::string_view protected_name, std::uint64_t seed);

}  // namespace fairbench
