#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbench/matrix.hpp"

namespace fairbench {

enum class LearnerKind { Cart, LogisticRegression, RandomForest, GaussianNb };

LearnerKind learner_kind_from_string(std::string_view name);
std::string to_string(LearnerKind kind);

/// Uniform fit/predict contract. Fitting replaces the model state; fitted
/// models are immutable and safe for concurrent predict calls. All
/// randomness comes from the explicit seed argument.
class Learner {
public:
    virtual ~Learner() = default;

    virtual LearnerKind kind() const noexcept = 0;

    /// `weights` may be empty (uniform). Requires >= 2 rows and both classes.
    virtual void fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                     std::uint64_t seed) = 0;

    /// P(y = 1) per row.
    virtual std::vector<double> predict_proba(const Matrix& X) const = 0;

    /// Thresholded at 0.5; a probability of exactly 0.5 predicts 1.
    std::vector<int> predict(const Matrix& X) const;

    virtual std::unique_ptr<Learner> clone() const = 0;

    bool is_fitted() const noexcept { return fitted_; }
    std::size_t feature_count() const noexcept { return n_features_; }

protected:
    void require_fitted() const;
    void check_input_width(const Matrix& X) const;
    /// Shared fit preconditions; returns effective weights (empty = uniform).
    static void validate_training_data(const Matrix& X, std::span<const int> y,
                                       std::span<const double> weights);

    bool fitted_ = false;
    std::size_t n_features_ = 0;
};

std::unique_ptr<Learner> make_learner(LearnerKind kind);

// ---------------------------------------------------------------------------

struct CartConfig {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_leaf = 1;
    /// Candidate features per split; 0 = all (set by RandomForest).
    std::size_t features_per_split = 0;
};

class Cart final : public Learner {
public:
    explicit Cart(CartConfig config = {}) : config_(config) {}

    LearnerKind kind() const noexcept override { return LearnerKind::Cart; }
    void fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
             std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& X) const override;
    std::unique_ptr<Learner> clone() const override { return std::make_unique<Cart>(*this); }

    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double p1 = 0.0;          // weighted P(y=1) in the node
        std::size_t support = 0;  // training rows reaching the node
        bool is_leaf() const { return feature < 0; }
    };

    const std::vector<Node>& nodes() const { return nodes_; }
    const CartConfig& config() const { return config_; }

    /// Training entry point over explicit row indices (repeats allowed);
    /// RandomForest feeds bootstrap samples through this.
    void fit_rows(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                  std::span<const std::size_t> rows, std::uint64_t seed);

private:
    CartConfig config_;
    std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 1000;
    double l2 = 1e-4;  // intercept is not regularized
};

class LogisticRegression final : public Learner {
public:
    explicit LogisticRegression(LogisticConfig config = {}) : config_(config) {}

    LearnerKind kind() const noexcept override { return LearnerKind::LogisticRegression; }
    void fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
             std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& X) const override;
    std::unique_ptr<Learner> clone() const override {
        return std::make_unique<LogisticRegression>(*this);
    }

    const std::vector<double>& coefficients() const { return coefficients_; }
    double intercept() const { return intercept_; }

    /// Mean weighted log-loss plus the L2 penalty for the given parameters;
    /// exposed so tests can run finite-difference checks on the gradient.
    static double loss(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                       std::span<const double> coefficients, double intercept, double l2);
    static void gradient(const Matrix& X, std::span<const int> y,
                         std::span<const double> weights, std::span<const double> coefficients,
                         double intercept, double l2, std::span<double> grad_out,
                         double& grad_intercept_out);

private:
    LogisticConfig config_;
    std::vector<double> coefficients_;
    double intercept_ = 0.0;
};

// ---------------------------------------------------------------------------

struct ForestConfig {
    std::size_t n_trees = 100;
    CartConfig tree;  // features_per_split 0 resolves to sqrt(d) at fit time
};

class RandomForest final : public Learner {
public:
    explicit RandomForest(ForestConfig config = {}) : config_(config) {}

    LearnerKind kind() const noexcept override { return LearnerKind::RandomForest; }
    void fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
             std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& X) const override;
    std::unique_ptr<Learner> clone() const override {
        return std::make_unique<RandomForest>(*this);
    }

    std::size_t tree_count() const { return trees_.size(); }
    const Cart& tree(std::size_t index) const { return trees_.at(index); }

private:
    ForestConfig config_;
    std::vector<Cart> trees_;
};

// ---------------------------------------------------------------------------

struct GaussianNbConfig {
    /// Added to every variance as `var_smoothing * max feature variance`.
    double var_smoothing = 1e-9;
};

class GaussianNb final : public Learner {
public:
    explicit GaussianNb(GaussianNbConfig config = {}) : config_(config) {}

    LearnerKind kind() const noexcept override { return LearnerKind::GaussianNb; }
    void fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
             std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& X) const override;
    std::unique_ptr<Learner> clone() const override { return std::make_unique<GaussianNb>(*this); }

private:
    GaussianNbConfig config_;
    double log_prior1_ = 0.0;
    double log_prior0_ = 0.0;
    std::vector<double> mean1_, mean0_, var1_, var0_;
};

// ---------------------------------------------------------------------------

/// Human-readable model summary: coefficient ranking for logistic regression,
/// a per-leaf rule list for CART.
struct Explanation {
    enum class Kind { Coefficients, RuleList };
    struct Entry {
        std::string description;
        double value = 0.0;  // coefficient or rule support
    };
    Kind kind = Kind::Coefficients;
    std::vector<Entry> entries;
    /// Set when the explained model predicts a protected attribute.
    std::string target;
};

/// Supported for Cart and LogisticRegression; throws for other kinds.
/// `feature_names` must match the training feature count.
Explanation extract_explanation(const Learner& learner,
                                std::span<const std::string> feature_names);

}  // namespace fairbench
