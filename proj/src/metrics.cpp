#include "fairbench/metrics.hpp"

#include <cmath>

#include "fairbench/error.hpp"

namespace fairbench {

std::optional<double> ConfusionMatrix::tpr() const {
    const std::size_t positives = tp + fn;
    if (positives == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(positives);
}

std::optional<double> ConfusionMatrix::fpr() const {
    const std::size_t negatives = fp + tn;
    if (negatives == 0) return std::nullopt;
    return static_cast<double>(fp) / static_cast<double>(negatives);
}

std::optional<double> ConfusionMatrix::positive_rate() const {
    if (total() == 0) return std::nullopt;
    return static_cast<double>(tp + fp) / static_cast<double>(total());
}

GroupedConfusion group_confusion(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::span<const int> protected_attr) {
    if (y_true.size() != y_pred.size() || y_true.size() != protected_attr.size())
        throw Error("group_confusion: input lengths differ");
    if (y_true.empty()) throw Error("group_confusion: empty input");
    GroupedConfusion out;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ConfusionMatrix& cell = protected_attr[i] == 1 ? out.privileged : out.unprivileged;
        if (y_true[i] == 1) {
            if (y_pred[i] == 1) ++cell.tp;
            else ++cell.fn;
        } else {
            if (y_pred[i] == 1) ++cell.fp;
            else ++cell.tn;
        }
    }
    return out;
}

FairnessReport fairness_report(const GroupedConfusion& confusion, double flip_rate) {
    FairnessReport report;
    report.fr = flip_rate;

    const auto tpr_p = confusion.privileged.tpr();
    const auto tpr_u = confusion.unprivileged.tpr();
    const auto fpr_p = confusion.privileged.fpr();
    const auto fpr_u = confusion.unprivileged.fpr();
    const auto rate_p = confusion.privileged.positive_rate();
    const auto rate_u = confusion.unprivileged.positive_rate();

    if (tpr_p && tpr_u) report.eod = std::abs(*tpr_u - *tpr_p);
    if (tpr_p && tpr_u && fpr_p && fpr_u)
        report.aod = std::abs(((*fpr_u - *fpr_p) + (*tpr_u - *tpr_p)) / 2.0);
    if (rate_p && rate_u) {
        report.spd = std::abs(*rate_u - *rate_p);
        if (*rate_p == 0.0) {
            report.di_deviation = *rate_u == 0.0 ? 0.0 : kDisparateImpactCap;
        } else {
            report.di_deviation = std::abs(1.0 - *rate_u / *rate_p);
        }
    }
    return report;
}

PerformanceReport performance_report(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw Error("performance_report: input lengths differ");
    if (y_true.empty()) throw Error("performance_report: empty input");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1) {
            if (y_pred[i] == 1) ++tp;
            else ++fn;
        } else {
            if (y_pred[i] == 1) ++fp;
            else ++tn;
        }
    }
    PerformanceReport report;
    report.accuracy = static_cast<double>(tp + tn) / static_cast<double>(y_true.size());
    report.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    report.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    report.f1 = report.precision + report.recall == 0.0
                    ? 0.0
                    : 2.0 * report.precision * report.recall /
                          (report.precision + report.recall);
    return report;
}

double flip_rate(const PredictFn& model_predict, const TabularDataset& test,
                 std::string_view protected_name) {
    if (test.rows() == 0) throw Error("flip_rate: empty test set");
    const std::size_t column = test.feature_index(protected_name);

    Matrix flipped = test.X;
    for (std::size_t r = 0; r < flipped.rows(); ++r)
        flipped(r, column) = 1.0 - flipped(r, column);

    const std::vector<int> original = model_predict(test.X);
    const std::vector<int> changed = model_predict(flipped);
    if (original.size() != test.rows() || changed.size() != test.rows())
        throw Error("flip_rate: prediction function returned wrong length");

    std::size_t flips = 0;
    for (std::size_t i = 0; i < original.size(); ++i)
        if (original[i] != changed[i]) ++flips;
    return static_cast<double>(flips) / static_cast<double>(original.size());
}

}  // namespace fairbench
