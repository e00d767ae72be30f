#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbench/learners.hpp"
#include "fairbench/tabular.hpp"

namespace fairbench {

struct EnsembleOptions {
    /// Weight every member equally instead of by balanced accuracy.
    bool uniform_vote_weights = false;
    std::size_t smote_k_neighbors = 5;
    /// Depth of CART extrapolation members (readable rules).
    std::size_t cart_max_depth = 5;
};

/// Budget-many models predicting one protected attribute from the
/// non-protected features, each trained on its own SMOTE-balanced sample.
/// Vote weights are each member's balanced accuracy on its own balanced
/// training data.
struct ExtrapolationEnsemble {
    std::vector<std::unique_ptr<Learner>> models;
    std::vector<double> vote_weights;
    std::string protected_name;
    std::vector<std::string> nonprotected_feature_names;
    std::vector<std::size_t> nonprotected_columns;  // into the full feature matrix

    ExtrapolationEnsemble() = default;
    ExtrapolationEnsemble(const ExtrapolationEnsemble& other);
    ExtrapolationEnsemble& operator=(const ExtrapolationEnsemble& other);
    ExtrapolationEnsemble(ExtrapolationEnsemble&&) = default;
    ExtrapolationEnsemble& operator=(ExtrapolationEnsemble&&) = default;
};

/// model_kind must be Cart or LogisticRegression. Non-protected features are
/// all columns that are not a declared protected attribute of `train`.
ExtrapolationEnsemble build_ensemble(const TabularDataset& train, std::string_view protected_name,
                                     LearnerKind model_kind, std::size_t budget,
                                     std::uint64_t seed, const EnsembleOptions& options = {});

/// Weighted vote over the ensemble's members on non-protected test features:
/// score = sum(w_i * vote_i) / sum(w_i); 1 above 0.5, 0 below, 0 on an exact
/// tie. `np_test` columns follow nonprotected_feature_names.
std::vector<int> synthesize_protected(const ExtrapolationEnsemble& ensemble,
                                      const Matrix& np_test);

struct XFairConfig {
    LearnerKind classifier = LearnerKind::RandomForest;
    LearnerKind extrapolation = LearnerKind::Cart;
    std::size_t budget = 5;
    EnsembleOptions ensemble;
};

/// One ensemble per protected attribute plus a classifier trained on the
/// original (unmodified) training data. At prediction time every protected
/// column is replaced by its ensemble's synthesized values, so predictions
/// are a pure function of non-protected features: flipping supplied
/// protected values can never change the output.
class XFairPipeline {
public:
    static XFairPipeline build(const TabularDataset& train,
                               std::span<const std::string> protected_names,
                               const XFairConfig& config, std::uint64_t seed);
    /// All declared protected attributes of `train`.
    static XFairPipeline build(const TabularDataset& train, const XFairConfig& config,
                               std::uint64_t seed);

    std::vector<int> predict(const Matrix& X) const;
    std::vector<int> predict(const TabularDataset& test) const;

    const ExtrapolationEnsemble& ensemble(std::string_view protected_name) const;
    std::span<const ExtrapolationEnsemble> ensembles() const { return ensembles_; }
    const Learner& classifier() const { return *classifier_; }
    std::span<const std::string> feature_names() const { return feature_names_; }

private:
    std::vector<ExtrapolationEnsemble> ensembles_;
    std::vector<std::size_t> protected_columns_;  // parallel to ensembles_
    std::unique_ptr<Learner> classifier_;
    std::vector<std::string> feature_names_;
};

/// Explanation of the highest-weighted ensemble member (ties to the first),
/// over the non-protected features, annotated with the protected attribute.
Explanation explain_bias(const ExtrapolationEnsemble& ensemble);

/// Count ratios unprivileged / privileged for each predicted label, over all
/// test rows and over the rows whose synthesized protected value differs
/// from the real one. Empty when the privileged denominator is zero.
struct RelabelRatioReport {
    std::optional<double> all_fav_ratio;
    std::optional<double> flipped_fav_ratio;
    std::optional<double> all_unfav_ratio;
    std::optional<double> flipped_unfav_ratio;
};

/// Requires a single-attribute pipeline and a test set containing both
/// groups of that attribute.
RelabelRatioReport relabel_ratio_report(const XFairPipeline& pipeline,
                                        const TabularDataset& test);

}  // namespace fairbench
