#include <algorithm>
#include <cmath>

#include "fairbench/error.hpp"
#include "fairbench/learners.hpp"

namespace fairbench {

void GaussianNb::fit(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                     std::uint64_t /*seed*/) {
    validate_training_data(X, y, weights);
    n_features_ = X.cols();
    const std::size_t d = X.cols();

    auto weight_of = [&](std::size_t r) { return weights.empty() ? 1.0 : weights[r]; };

    double w1 = 0.0, w0 = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) (y[r] == 1 ? w1 : w0) += weight_of(r);
    if (w1 <= 0.0 || w0 <= 0.0)
        throw Error("gaussian nb: one class has zero total weight");
    const double w_total = w1 + w0;
    log_prior1_ = std::log(w1 / w_total);
    log_prior0_ = std::log(w0 / w_total);

    mean1_.assign(d, 0.0);
    mean0_.assign(d, 0.0);
    var1_.assign(d, 0.0);
    var0_.assign(d, 0.0);
    std::vector<double> mean_all(d, 0.0), var_all(d, 0.0);

    for (std::size_t r = 0; r < X.rows(); ++r) {
        const double w = weight_of(r);
        auto row = X.row(r);
        auto& mean = y[r] == 1 ? mean1_ : mean0_;
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += w * row[j];
            mean_all[j] += w * row[j];
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        mean1_[j] /= w1;
        mean0_[j] /= w0;
        mean_all[j] /= w_total;
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const double w = weight_of(r);
        auto row = X.row(r);
        auto& mean = y[r] == 1 ? mean1_ : mean0_;
        auto& var = y[r] == 1 ? var1_ : var0_;
        for (std::size_t j = 0; j < d; ++j) {
            const double dm = row[j] - mean[j];
            var[j] += w * dm * dm;
            const double da = row[j] - mean_all[j];
            var_all[j] += w * da * da;
        }
    }
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) max_var = std::max(max_var, var_all[j] / w_total);
    const double epsilon = config_.var_smoothing * max_var;
    for (std::size_t j = 0; j < d; ++j) {
        var1_[j] = var1_[j] / w1 + epsilon;
        var0_[j] = var0_[j] / w0 + epsilon;
        // Guard fully degenerate features (all values identical everywhere).
        if (var1_[j] <= 0.0) var1_[j] = 1e-12;
        if (var0_[j] <= 0.0) var0_[j] = 1e-12;
    }
    fitted_ = true;
}

std::vector<double> GaussianNb::predict_proba(const Matrix& X) const {
    require_fitted();
    check_input_width(X);
    constexpr double log_2pi = 1.8378770664093454835606594728112;
    std::vector<double> proba(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        auto row = X.row(r);
        double log1 = log_prior1_;
        double log0 = log_prior0_;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double d1 = row[j] - mean1_[j];
            log1 -= 0.5 * (log_2pi + std::log(var1_[j]) + d1 * d1 / var1_[j]);
            const double d0 = row[j] - mean0_[j];
            log0 -= 0.5 * (log_2pi + std::log(var0_[j]) + d0 * d0 / var0_[j]);
        }
        // log-sum-exp normalization
        const double m = std::max(log1, log0);
        const double z = std::exp(log1 - m) + std::exp(log0 - m);
        proba[r] = std::exp(log1 - m) / z;
    }
    return proba;
}

}  // namespace fairbench
