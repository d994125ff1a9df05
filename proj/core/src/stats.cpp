#include "sojourn/stats.hpp"

#include <cmath>
#include <numeric>

#include "sojourn/errors.hpp"

namespace sojourn {

BatchTable::BatchTable(std::size_t n_batches, std::size_t n_quantities)
    : width_(n_quantities), sums_(n_batches * n_quantities, 0.0), counts_(n_batches, 0) {}

std::size_t BatchTable::total_count() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

double BatchTable::mean(std::size_t q) const noexcept {
    double s = 0.0;
    for (std::size_t b = 0; b < batches(); ++b) s += batch_sum(b, q);
    const auto n = total_count();
    return n == 0 ? 0.0 : s / static_cast<double>(n);
}

double BatchTable::std_err(std::size_t q) const noexcept {
    const std::size_t nb = batches();
    const auto n = static_cast<double>(total_count());
    if (nb < 2 || n == 0.0) return 0.0;
    const double m = mean(q);
    double ss = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const double r = batch_sum(b, q) - static_cast<double>(counts_[b]) * m;
        ss += r * r;
    }
    const double nbd = static_cast<double>(nb);
    return std::sqrt(nbd / (nbd - 1.0) * ss) / n;
}

std::pair<double, double> BatchTable::ratio(std::size_t numerator, std::size_t denominator) const noexcept {
    std::vector<double> a(batches()), c(batches());
    for (std::size_t b = 0; b < batches(); ++b) {
        a[b] = batch_sum(b, numerator);
        c[b] = batch_sum(b, denominator);
    }
    return batch_ratio(a, c);
}

void BatchTable::append(const BatchTable& other) {
    if (width_ == 0 && counts_.empty()) width_ = other.width_;
    if (other.width_ != width_) throw ConfigError("batch table: quantity count mismatch");
    sums_.insert(sums_.end(), other.sums_.begin(), other.sums_.end());
    counts_.insert(counts_.end(), other.counts_.begin(), other.counts_.end());
}

std::pair<double, double> batch_ratio(std::span<const double> a, std::span<const double> c) noexcept {
    const double sa = std::accumulate(a.begin(), a.end(), 0.0);
    const double sc = std::accumulate(c.begin(), c.end(), 0.0);
    if (sc == 0.0) return {0.0, 0.0};
    const double r = sa / sc;
    const std::size_t nb = a.size();
    if (nb < 2) return {r, 0.0};
    double ss = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const double e = a[b] - r * c[b];
        ss += e * e;
    }
    const double nbd = static_cast<double>(nb);
    return {r, std::sqrt(nbd / (nbd - 1.0) * ss) / std::abs(sc)};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> se) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n || se.size() != n) throw ConfigError("fit_line: need >= 2 matching points");
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0;
    for (double xi : x) sxx += (xi - xbar) * (xi - xbar);
    if (!(sxx > 0.0)) throw NumericError("fit_line: abscissae are all equal");
    LineFit fit;
    fit.slope_weights.resize(n);
    fit.intercept_weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.slope_weights[i] = (x[i] - xbar) / sxx;
        fit.intercept_weights[i] = 1.0 / static_cast<double>(n) - xbar * fit.slope_weights[i];
    }
    double var_s = 0.0, var_i = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.slope += fit.slope_weights[i] * y[i];
        fit.intercept += fit.intercept_weights[i] * y[i];
        var_s += fit.slope_weights[i] * fit.slope_weights[i] * se[i] * se[i];
        var_i += fit.intercept_weights[i] * fit.intercept_weights[i] * se[i] * se[i];
    }
    fit.slope_se = std::sqrt(var_s);
    fit.intercept_se = std::sqrt(var_i);
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - (fit.slope * x[i] + fit.intercept);
        if (se[i] > 0.0) fit.max_standardised_residual = std::max(fit.max_standardised_residual, std::abs(fit.residuals[i]) / se[i]);
    }
    return fit;
}

Interval95 wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace sojourn
