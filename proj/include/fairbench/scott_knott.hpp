#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace fairbench {

/// One treatment's observations across repeated runs.
struct TreatmentSamples {
    std::string name;
    std::vector<double> values;
};

/// 1 = best; statistically indistinguishable treatments share a rank and
/// ranks are contiguous.
struct RankAssignment {
    std::map<std::string, int> ranks;
};

/// Cliff's delta: P(a > b) - P(a < b) over all pairs, in [-1, 1].
double cliffs_delta(std::span<const double> a, std::span<const double> b);

/// Effect sizes below this are "small"; such splits are rejected.
inline constexpr double kSmallEffectThreshold = 0.147;

/// Expected difference objective for cutting a sorted list at `cut`
/// (1 <= cut < |l|): (|l1|/|l|)(mean(l1)-mean(l))^2 + (|l2|/|l|)(mean(l2)-mean(l))^2.
double split_objective(std::span<const double> values, std::size_t cut);

/// Scott-Knott ranking: sort treatments by median, recursively cut where the
/// objective over the per-treatment medians is maximal, and accept a cut only
/// when |cliffs_delta| of the pooled sides is at least `effect_threshold`.
RankAssignment scott_knott_rank(std::span<const TreatmentSamples> treatments,
                                bool smaller_is_better,
                                double effect_threshold = kSmallEffectThreshold);

double median(std::span<const double> values);

}  // namespace fairbench
