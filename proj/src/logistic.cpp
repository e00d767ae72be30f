#include <algorithm>
#include <cmath>

#include "fairbench/error.hpp"
#include "fairbench/learners.hpp"

namespace fairbench {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double log1p_exp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double total_weight(std::span<const double> weights, std::size_t n) {
    if (weights.empty()) return static_cast<double>(n);
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
}

}  // namespace

double LogisticRegression::loss(const Matrix& X, std::span<const int> y,
                                std::span<const double> weights,
                                std::span<const double> coefficients, double intercept,
                                double l2) {
    const double w_total = total_weight(weights, X.rows());
    double data_term = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double z = intercept;
        auto row = X.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) z += coefficients[j] * row[j];
        // cross-entropy: log(1+e^z) - y z
        double ce = log1p_exp(z) - static_cast<double>(y[r]) * z;
        data_term += (weights.empty() ? 1.0 : weights[r]) * ce;
    }
    double penalty = 0.0;
    for (double c : coefficients) penalty += c * c;
    return data_term / w_total + 0.5 * l2 * penalty;
}

void LogisticRegression::gradient(const Matrix& X, std::span<const int> y,
                                  std::span<const double> weights,
                                  std::span<const double> coefficients, double intercept,
                                  double l2, std::span<double> grad_out,
                                  double& grad_intercept_out) {
    const double w_total = total_weight(weights, X.rows());
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    grad_intercept_out = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double z = intercept;
        auto row = X.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) z += coefficients[j] * row[j];
        const double residual =
            (weights.empty() ? 1.0 : weights[r]) * (sigmoid(z) - static_cast<double>(y[r]));
        for (std::size_t j = 0; j < row.size(); ++j) grad_out[j] += residual * row[j];
        grad_intercept_out += residual;
    }
    for (std::size_t j = 0; j < grad_out.size(); ++j)
        grad_out[j] = grad_out[j] / w_total + l2 * coefficients[j];
    grad_intercept_out /= w_total;
}

void LogisticRegression::fit(const Matrix& X, std::span<const int> y,
                             std::span<const double> weights, std::uint64_t /*seed*/) {
    validate_training_data(X, y, weights);
    n_features_ = X.cols();
    coefficients_.assign(X.cols(), 0.0);  // zero init keeps training deterministic
    intercept_ = 0.0;

    std::vector<double> grad(X.cols());
    double grad_intercept = 0.0;
    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
        gradient(X, y, weights, coefficients_, intercept_, config_.l2, grad, grad_intercept);
        for (std::size_t j = 0; j < coefficients_.size(); ++j)
            coefficients_[j] -= config_.learning_rate * grad[j];
        intercept_ -= config_.learning_rate * grad_intercept;
    }
    fitted_ = true;
}

std::vector<double> LogisticRegression::predict_proba(const Matrix& X) const {
    require_fitted();
    check_input_width(X);
    std::vector<double> proba(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double z = intercept_;
        auto row = X.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) z += coefficients_[j] * row[j];
        proba[r] = sigmoid(z);
    }
    return proba;
}

}  // namespace fairbench
