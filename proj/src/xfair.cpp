#include "fairbench/xfair.hpp"

#include <algorithm>
#include <unordered_set>

#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"
#include "fairbench/smote.hpp"

namespace fairbench {

namespace {

std::unique_ptr<Learner> make_extrapolation_model(LearnerKind kind,
                                                  const EnsembleOptions& options) {
    if (kind == LearnerKind::Cart) {
        CartConfig config;
        config.max_depth = options.cart_max_depth;
        return std::make_unique<Cart>(config);
    }
    if (kind == LearnerKind::LogisticRegression)
        return std::make_unique<LogisticRegression>();
    throw Error("extrapolation model must be cart or lr, got " + to_string(kind));
}

double balanced_accuracy(std::span<const int> truth, std::span<const int> predicted) {
    std::size_t tp = 0, tn = 0, positives = 0, negatives = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1) {
            ++positives;
            if (predicted[i] == 1) ++tp;
        } else {
            ++negatives;
            if (predicted[i] == 0) ++tn;
        }
    }
    double tpr = positives == 0 ? 0.0 : static_cast<double>(tp) / positives;
    double tnr = negatives == 0 ? 0.0 : static_cast<double>(tn) / negatives;
    return (tpr + tnr) / 2.0;
}

}  // namespace

ExtrapolationEnsemble::ExtrapolationEnsemble(const ExtrapolationEnsemble& other)
    : vote_weights(other.vote_weights),
      protected_name(other.protected_name),
      nonprotected_feature_names(other.nonprotected_feature_names),
      nonprotected_columns(other.nonprotected_columns) {
    models.reserve(other.models.size());
    for (const auto& model : other.models) models.push_back(model->clone());
}

ExtrapolationEnsemble& ExtrapolationEnsemble::operator=(const ExtrapolationEnsemble& other) {
    if (this != &other) *this = ExtrapolationEnsemble(other);
    return *this;
}

ExtrapolationEnsemble build_ensemble(const TabularDataset& train, std::string_view protected_name,
                                     LearnerKind model_kind, std::size_t budget,
                                     std::uint64_t seed, const EnsembleOptions& options) {
    if (budget < 1) throw Error("ensemble budget must be at least 1");
    const std::vector<int>& target = train.protected_values(protected_name);
    bool has0 = false, has1 = false;
    for (int v : target) (v == 1 ? has1 : has0) = true;
    if (!has0 || !has1)
        throw Error("protected column \"" + std::string(protected_name) +
                    "\" is constant in the training data");

    ExtrapolationEnsemble ensemble;
    ensemble.protected_name = std::string(protected_name);
    ensemble.nonprotected_columns = train.nonprotected_columns();
    for (std::size_t column : ensemble.nonprotected_columns)
        ensemble.nonprotected_feature_names.push_back(train.feature_names[column]);

    const Matrix np_features = train.X.select_cols(ensemble.nonprotected_columns);

    // One-hot groups remapped into the non-protected column space so SMOTE
    // can repair synthetic rows.
    std::vector<OneHotGroup> np_groups;
    {
        std::vector<std::size_t> position(train.X.cols(), static_cast<std::size_t>(-1));
        for (std::size_t i = 0; i < ensemble.nonprotected_columns.size(); ++i)
            position[ensemble.nonprotected_columns[i]] = i;
        for (const auto& group : train.encoding_map) {
            OneHotGroup remapped;
            remapped.column = group.column;
            bool complete = true;
            for (std::size_t i = 0; i < group.column_indices.size(); ++i) {
                const std::size_t mapped = position[group.column_indices[i]];
                if (mapped == static_cast<std::size_t>(-1)) {
                    complete = false;
                    break;
                }
                remapped.categories.push_back(group.categories[i]);
                remapped.column_indices.push_back(mapped);
            }
            if (complete) np_groups.push_back(std::move(remapped));
        }
    }

    SmoteSampler sampler(np_features, target, options.smote_k_neighbors, np_groups);
    for (std::size_t i = 0; i < budget; ++i) {
        auto [balanced_X, balanced_y] = sampler.sample(derive_seed(seed, i));
        auto model = make_extrapolation_model(model_kind, options);
        model->fit(balanced_X, balanced_y, {}, derive_seed(seed, budget + i));
        double weight = 1.0;
        if (!options.uniform_vote_weights) {
            const std::vector<int> predictions = model->predict(balanced_X);
            weight = balanced_accuracy(balanced_y, predictions);
            weight = std::max(weight, 1e-6);  // vote weights stay positive
        }
        ensemble.models.push_back(std::move(model));
        ensemble.vote_weights.push_back(weight);
    }
    return ensemble;
}

std::vector<int> synthesize_protected(const ExtrapolationEnsemble& ensemble,
                                      const Matrix& np_test) {
    if (ensemble.models.empty()) throw Error("ensemble has no models");
    if (np_test.cols() != ensemble.nonprotected_feature_names.size())
        throw Error("synthesize_protected: expected " +
                    std::to_string(ensemble.nonprotected_feature_names.size()) +
                    " non-protected features, got " + std::to_string(np_test.cols()));

    double weight_total = 0.0;
    for (double w : ensemble.vote_weights) weight_total += w;

    std::vector<double> scores(np_test.rows(), 0.0);
    for (std::size_t m = 0; m < ensemble.models.size(); ++m) {
        const std::vector<int> votes = ensemble.models[m]->predict(np_test);
        const double w = ensemble.vote_weights[m];
        for (std::size_t r = 0; r < scores.size(); ++r)
            scores[r] += w * static_cast<double>(votes[r]);
    }

    std::vector<int> out(np_test.rows());
    for (std::size_t r = 0; r < out.size(); ++r) {
        const double score = scores[r] / weight_total;
        out[r] = score > 0.5 ? 1 : 0;  // exact tie goes to the unprivileged side
    }
    return out;
}

XFairPipeline XFairPipeline::build(const TabularDataset& train,
                                   std::span<const std::string> protected_names,
                                   const XFairConfig& config, std::uint64_t seed) {
    if (protected_names.empty()) throw Error("xfair pipeline needs a protected attribute");
    XFairPipeline pipeline;
    pipeline.feature_names_.assign(train.feature_names.begin(), train.feature_names.end());

    std::unordered_set<std::string> seen;
    std::size_t stream = 0;
    for (const auto& name : protected_names) {
        if (!seen.insert(name).second)
            throw Error("duplicate protected attribute: \"" + name + "\"");
        pipeline.ensembles_.push_back(build_ensemble(train, name, config.extrapolation,
                                                     config.budget,
                                                     derive_seed(seed, 1000 + stream),
                                                     config.ensemble));
        pipeline.protected_columns_.push_back(train.feature_index(name));
        ++stream;
    }

    pipeline.classifier_ = make_learner(config.classifier);
    pipeline.classifier_->fit(train.X, train.y, {}, derive_seed(seed, 2000));
    return pipeline;
}

XFairPipeline XFairPipeline::build(const TabularDataset& train, const XFairConfig& config,
                                   std::uint64_t seed) {
    const std::vector<std::string> names = train.protected_names();
    return build(train, names, config, seed);
}

std::vector<int> XFairPipeline::predict(const Matrix& X) const {
    if (X.cols() != feature_names_.size())
        throw Error("xfair predict: expected " + std::to_string(feature_names_.size()) +
                    " features, got " + std::to_string(X.cols()));
    Matrix mutated = X;
    for (std::size_t e = 0; e < ensembles_.size(); ++e) {
        const Matrix np = X.select_cols(ensembles_[e].nonprotected_columns);
        const std::vector<int> synthesized = synthesize_protected(ensembles_[e], np);
        for (std::size_t r = 0; r < mutated.rows(); ++r)
            mutated(r, protected_columns_[e]) = static_cast<double>(synthesized[r]);
    }
    return classifier_->predict(mutated);
}

std::vector<int> XFairPipeline::predict(const TabularDataset& test) const {
    return predict(test.X);
}

const ExtrapolationEnsemble& XFairPipeline::ensemble(std::string_view protected_name) const {
    for (const auto& ensemble : ensembles_)
        if (ensemble.protected_name == protected_name) return ensemble;
    throw Error("pipeline has no ensemble for protected attribute \"" +
                std::string(protected_name) + "\"");
}

Explanation explain_bias(const ExtrapolationEnsemble& ensemble) {
    if (ensemble.models.empty()) throw Error("ensemble has no models");
    std::size_t best = 0;
    for (std::size_t m = 1; m < ensemble.models.size(); ++m)
        if (ensemble.vote_weights[m] > ensemble.vote_weights[best]) best = m;
    Explanation explanation =
        extract_explanation(*ensemble.models[best], ensemble.nonprotected_feature_names);
    explanation.target = ensemble.protected_name;
    return explanation;
}

RelabelRatioReport relabel_ratio_report(const XFairPipeline& pipeline,
                                        const TabularDataset& test) {
    if (pipeline.ensembles().size() != 1)
        throw Error("relabel_ratio_report requires a single-attribute pipeline");
    const ExtrapolationEnsemble& ensemble = pipeline.ensembles().front();
    const std::vector<int>& real = test.protected_values(ensemble.protected_name);

    std::size_t privileged = 0, unprivileged = 0;
    for (int v : real) (v == 1 ? privileged : unprivileged) += 1;
    if (privileged == 0 || unprivileged == 0)
        throw Error("relabel_ratio_report: test set lacks one of the groups");

    const std::vector<int> predictions = pipeline.predict(test);
    const std::vector<int> synthesized = synthesize_protected(
        ensemble, test.X.select_cols(ensemble.nonprotected_columns));

    // counts[scope][group][label]: scope 0 = all rows, 1 = flipped rows.
    std::size_t counts[2][2][2] = {};
    for (std::size_t r = 0; r < test.rows(); ++r) {
        counts[0][real[r]][predictions[r]] += 1;
        if (synthesized[r] != real[r]) counts[1][real[r]][predictions[r]] += 1;
    }

    auto ratio = [&](std::size_t scope, int label) -> std::optional<double> {
        const std::size_t priv = counts[scope][1][label];
        const std::size_t unpriv = counts[scope][0][label];
        if (priv == 0) return std::nullopt;
        return static_cast<double>(unpriv) / static_cast<double>(priv);
    };

    RelabelRatioReport report;
    report.all_fav_ratio = ratio(0, 1);
    report.flipped_fav_ratio = ratio(1, 1);
    report.all_unfav_ratio = ratio(0, 0);
    report.flipped_unfav_ratio = ratio(1, 0);
    return report;
}

}  // namespace fairbench
