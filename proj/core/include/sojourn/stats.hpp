#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sojourn {

/// Per-batch sums of several quantities estimated on shared samples.
/// Batch-means standard errors are robust to the heavy right tail of exp(z_x).
class BatchTable {
public:
    BatchTable() = default;
    BatchTable(std::size_t n_batches, std::size_t n_quantities);

    void add(std::size_t batch, std::size_t quantity, double value) noexcept {
        sums_[batch * width_ + quantity] += value;
    }
    void add_count(std::size_t batch, std::size_t n = 1) noexcept { counts_[batch] += n; }

    [[nodiscard]] std::size_t batches() const noexcept { return counts_.size(); }
    [[nodiscard]] std::size_t quantities() const noexcept { return width_; }
    [[nodiscard]] std::size_t total_count() const noexcept;
    [[nodiscard]] double batch_sum(std::size_t batch, std::size_t quantity) const noexcept {
        return sums_[batch * width_ + quantity];
    }
    [[nodiscard]] std::size_t batch_count(std::size_t batch) const noexcept { return counts_[batch]; }

    [[nodiscard]] double mean(std::size_t quantity) const noexcept;
    [[nodiscard]] double std_err(std::size_t quantity) const noexcept;
    /// Ratio of two means with a batch-linearised standard error.
    [[nodiscard]] std::pair<double, double> ratio(std::size_t numerator, std::size_t denominator) const noexcept;

    /// Appends the batches of `other` (same quantity count).
    void append(const BatchTable& other);

private:
    std::size_t width_ = 0;
    std::vector<double> sums_;
    std::vector<std::size_t> counts_;
};

/// Ratio  sum(a) / sum(c)  over paired batch totals with the ratio-estimator standard error.
[[nodiscard]] std::pair<double, double> batch_ratio(std::span<const double> a, std::span<const double> c) noexcept;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    std::vector<double> residuals;
    /// Largest |residual| / se over the points.
    double max_standardised_residual = 0.0;
    /// OLS weights w_i with slope = sum_i w_i y_i.
    std::vector<double> slope_weights;
    std::vector<double> intercept_weights;
};

/// Ordinary least squares y = slope * x + intercept for independent y_i with
/// standard errors se_i (used only for error propagation, not weighting).
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> se);

struct Interval95 {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion.
[[nodiscard]] Interval95 wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
template <class Cdf>
[[nodiscard]] double ks_distance(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

}  // namespace sojourn
