#include "fairbench/learners.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairbench/error.hpp"

namespace fairbench {

LearnerKind learner_kind_from_string(std::string_view name) {
    if (name == "cart") return LearnerKind::Cart;
    if (name == "lr") return LearnerKind::LogisticRegression;
    if (name == "rf") return LearnerKind::RandomForest;
    if (name == "nb") return LearnerKind::GaussianNb;
    throw Error("unknown learner kind: \"" + std::string(name) +
                "\" (expected rf, cart, lr or nb)");
}

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Cart: return "cart";
        case LearnerKind::LogisticRegression: return "lr";
        case LearnerKind::RandomForest: return "rf";
        case LearnerKind::GaussianNb: return "nb";
    }
    return "unknown";
}

std::vector<int> Learner::predict(const Matrix& X) const {
    std::vector<double> proba = predict_proba(X);
    std::vector<int> labels(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) labels[i] = proba[i] >= 0.5 ? 1 : 0;
    return labels;
}

void Learner::require_fitted() const {
    if (!fitted_) throw Error("predict called before fit");
}

void Learner::check_input_width(const Matrix& X) const {
    if (X.cols() != n_features_)
        throw Error("feature count mismatch: model expects " + std::to_string(n_features_) +
                    ", got " + std::to_string(X.cols()));
}

void Learner::validate_training_data(const Matrix& X, std::span<const int> y,
                                     std::span<const double> weights) {
    if (X.rows() != y.size())
        throw Error("training data dimension mismatch: " + std::to_string(X.rows()) +
                    " rows vs " + std::to_string(y.size()) + " labels");
    if (X.rows() < 2) throw Error("training data needs at least 2 rows");
    if (!weights.empty()) {
        if (weights.size() != y.size())
            throw Error("sample weights length mismatch: " + std::to_string(weights.size()) +
                        " vs " + std::to_string(y.size()) + " rows");
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw Error("sample weights must be non-negative");
            total += w;
        }
        if (total <= 0.0) throw Error("sample weights must not all be zero");
    }
    bool has0 = false, has1 = false;
    for (int label : y) {
        if (label == 0) has0 = true;
        else if (label == 1) has1 = true;
        else throw Error("labels must be 0 or 1");
    }
    if (!has0 || !has1) throw Error("training labels contain a single class");
}

std::unique_ptr<Learner> make_learner(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Cart: return std::make_unique<Cart>();
        case LearnerKind::LogisticRegression: return std::make_unique<LogisticRegression>();
        case LearnerKind::RandomForest: return std::make_unique<RandomForest>();
        case LearnerKind::GaussianNb: return std::make_unique<GaussianNb>();
    }
    throw Error("unknown learner kind");
}

namespace {

std::string format_threshold(double value) {
    std::ostringstream os;
    os.precision(6);
    os << value;
    return os.str();
}

void collect_rules(const std::vector<Cart::Node>& nodes, int index, std::vector<std::string>& path,
                   std::vector<Explanation::Entry>& out,
                   std::span<const std::string> feature_names) {
    const Cart::Node& node = nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
        std::string description;
        if (path.empty()) {
            description = "always";
        } else {
            for (std::size_t i = 0; i < path.size(); ++i) {
                if (i) description += " and ";
                description += path[i];
            }
        }
        description += " -> ";
        description += node.p1 >= 0.5 ? '1' : '0';
        out.push_back({std::move(description), static_cast<double>(node.support)});
        return;
    }
    const std::string& name = feature_names[static_cast<std::size_t>(node.feature)];
    path.push_back(name + " <= " + format_threshold(node.threshold));
    collect_rules(nodes, node.left, path, out, feature_names);
    path.back() = name + " > " + format_threshold(node.threshold);
    collect_rules(nodes, node.right, path, out, feature_names);
    path.pop_back();
}

}  // namespace

Explanation extract_explanation(const Learner& learner,
                                std::span<const std::string> feature_names) {
    if (!learner.is_fitted()) throw Error("cannot explain an unfitted model");
    if (feature_names.size() != learner.feature_count())
        throw Error("feature name count does not match model width");
    Explanation explanation;
    if (learner.kind() == LearnerKind::LogisticRegression) {
        const auto& lr = static_cast<const LogisticRegression&>(learner);
        explanation.kind = Explanation::Kind::Coefficients;
        for (std::size_t i = 0; i < feature_names.size(); ++i)
            explanation.entries.push_back({feature_names[i], lr.coefficients()[i]});
        std::stable_sort(explanation.entries.begin(), explanation.entries.end(),
                         [](const auto& a, const auto& b) {
                             return std::abs(a.value) > std::abs(b.value);
                         });
        return explanation;
    }
    if (learner.kind() == LearnerKind::Cart) {
        const auto& cart = static_cast<const Cart&>(learner);
        explanation.kind = Explanation::Kind::RuleList;
        std::vector<std::string> path;
        collect_rules(cart.nodes(), 0, path, explanation.entries, feature_names);
        // Most-covering rules first.
        std::stable_sort(explanation.entries.begin(), explanation.entries.end(),
                         [](const auto& a, const auto& b) { return a.value > b.value; });
        return explanation;
    }
    throw Error("explanations require a cart or lr model, got " + to_string(learner.kind()));
}

}  // namespace fairbench
