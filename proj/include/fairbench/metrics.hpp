#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fairbench/matrix.hpp"
#include "fairbench/tabular.hpp"

namespace fairbench {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    /// TP / (TP + FN); empty when no positives.
    std::optional<double> tpr() const;
    /// FP / (FP + TN); empty when no negatives.
    std::optional<double> fpr() const;
    /// P(predicted 1); empty when the group is empty.
    std::optional<double> positive_rate() const;
};

/// Per-group confusion matrices; label 1 = favorable, group 1 = privileged.
struct GroupedConfusion {
    ConfusionMatrix privileged;
    ConfusionMatrix unprivileged;
};

/// All values reported as absolute deviations from parity (0 = fair).
/// A metric is empty when a group rate it needs is undefined.
struct FairnessReport {
    std::optional<double> aod;
    std::optional<double> eod;
    std::optional<double> spd;
    std::optional<double> di_deviation;  // |1 - unprivileged rate / privileged rate|
    double fr = 0.0;
};

struct PerformanceReport {
    double accuracy = 0.0;
    double precision = 0.0;  // 0 when tp + fp = 0
    double recall = 0.0;     // 0 when tp + fn = 0
    double f1 = 0.0;         // 0 when precision + recall = 0
};

GroupedConfusion group_confusion(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::span<const int> protected_attr);

/// Sentinel for di_deviation when only the privileged rate is zero.
inline constexpr double kDisparateImpactCap = 10.0;

FairnessReport fairness_report(const GroupedConfusion& confusion, double flip_rate);

PerformanceReport performance_report(std::span<const int> y_true, std::span<const int> y_pred);

using PredictFn = std::function<std::vector<int>(const Matrix&)>;

/// Situation testing: fraction of rows whose prediction changes when their
/// protected feature column is flipped (1 <-> 0).
double flip_rate(const PredictFn& model_predict, const TabularDataset& test,
                 std::string_view protected_name);

}  // namespace fairbench
