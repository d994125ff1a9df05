#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sojourn/gauss_sim.hpp"
#include "sojourn/stats.hpp"

namespace sojourn {

/// How each Monte Carlo sample of exp(z_x) is produced.
///
/// plain:  exp(z_x(W)) for W = sqrt(2) B - |t|^alpha - h.
/// tilted: the same expectation under the change of measure with density
///         (1/n) sum_i exp(sqrt(2) B(t_i) - |t_i|^alpha): a uniformly chosen grid
///         node becomes the fBm origin and the sample is weighted by
///         n / sum_i exp(W0(t_i)). Unbiased for the same grid quantity, with
///         bounded per-sample values, which keeps long domains tractable.
enum class Sampler { plain, tilted };

struct McSettings {
    double grid_step = 1.0 / 64.0;
    std::size_t n_samples = 10000;
    std::uint64_t seed = 0;
    std::size_t chunk_size = 0;  // 0: about 100 chunks
    unsigned workers = 1;
    Sampler sampler = Sampler::tilted;
    bool antithetic = false;
    bool refine_check = false;
    /// Stream namespace; callers that run several estimations under one seed
    /// give each a different purpose.
    std::uint64_t purpose = 0;

    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    [[nodiscard]] double length() const noexcept { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Rectangle {
    Interval axis1;
    Interval axis2;
    [[nodiscard]] double area() const noexcept { return axis1.length() * axis2.length(); }
    friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

using DomainDescriptor = std::variant<Interval, Rectangle>;

struct ConstantEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::size_t n_samples = 0;
    double grid_step = 0.0;
    DomainDescriptor domain = Interval{};
    double normalization = 1.0;
    std::uint64_t seed = 0;
    std::vector<std::string> flags;

    [[nodiscard]] bool has_flag(const std::string& f) const;
};

/// Estimates for several x on one shared sample set (pathwise monotone in x).
struct CurveEstimate {
    std::vector<double> xs;
    std::vector<ConstantEstimate> points;
    /// Per-batch sums of the per-sample estimator (before normalisation), one quantity per x.
    BatchTable batches;

    /// points[k].value / points[0].value with a batch-linearised standard error.
    [[nodiscard]] std::pair<double, double> ratio_to_first(std::size_t k) const noexcept;
};

/// S -> infinity limit obtained from a schedule of finite domains.
struct LimitEstimate {
    ConstantEstimate limit;
    double intercept = 0.0;
    double intercept_se = 0.0;
    std::vector<double> schedule;
    std::vector<ConstantEstimate> per_s;
};

struct LimitCurve {
    std::vector<double> xs;
    std::vector<LimitEstimate> estimates;
    /// limit(x) / limit(xs[0]) and its standard error, computed on shared samples.
    std::vector<double> ratio;
    std::vector<double> ratio_se;
};

/// Domain G(S, alpha1, beta1, alpha2, beta2): [-S, S] on axes with alpha_i >= beta_i,
/// [0, S] otherwise; the estimate is divided by S to the number of one-sided axes.
struct DomainRule {
    double S = 1.0;
    std::array<bool, 2> two_sided{false, false};

    /// beta_i = +infinity encodes a zero drift.
    [[nodiscard]] static DomainRule from_exponents(double S, double alpha1, double beta1, double alpha2, double beta2);

    [[nodiscard]] int normalization_exponent() const noexcept;
    [[nodiscard]] double normalization() const noexcept;
    [[nodiscard]] Rectangle rectangle() const noexcept;
    [[nodiscard]] DomainRule with_size(double s) const noexcept { return {s, two_sided}; }
    void validate() const;
};

// --- one-dimensional constants ---------------------------------------------------

/// B_alpha^h(x, [a, b]) = int P(mes{t in [a, b] : W(t) > z} > x) e^z dz, W = sqrt(2) B - |t|^alpha - h.
[[nodiscard]] ConstantEstimate estimate_berman_1d(double alpha, const DriftSpec& drift, double x,
                                                  const Interval& interval, const McSettings& settings);

[[nodiscard]] CurveEstimate berman_1d_curve(double alpha, const DriftSpec& drift, std::span<const double> xs,
                                            const Interval& interval, const McSettings& settings);

/// B_alpha(x) = lim B_alpha(x, [0, S]) / S as the least-squares slope of
/// B_alpha(x, [0, S]) against S over the schedule.
[[nodiscard]] LimitEstimate estimate_berman_1d_limit(double alpha, double x, std::span<const double> schedule,
                                                     const McSettings& settings);

[[nodiscard]] LimitCurve berman_1d_limit_curve(double alpha, std::span<const double> xs,
                                               std::span<const double> schedule, const McSettings& settings);

/// Pickands constant H_alpha = B_alpha(0).
[[nodiscard]] LimitEstimate estimate_pickands(double alpha, std::span<const double> schedule,
                                              const McSettings& settings);

// --- two-dimensional constants ---------------------------------------------------

/// B_{alpha1,alpha2}^{h1,h2}(x, G(S)) / S^k for the rule's S. alpha_i = 0 gives a
/// pure-drift axis (B_0 == 0).
[[nodiscard]] ConstantEstimate estimate_berman_2d(double alpha1, double alpha2, const DriftSpec& drift1,
                                                  const DriftSpec& drift2, double x, const DomainRule& rule,
                                                  const McSettings& settings);

[[nodiscard]] CurveEstimate berman_2d_curve(double alpha1, double alpha2, const DriftSpec& drift1,
                                            const DriftSpec& drift2, std::span<const double> xs,
                                            const DomainRule& rule, const McSettings& settings);

/// S -> infinity: fits  B(x, G(S)) / S^k = c + d / S  over the schedule and returns c;
/// with k = 0 the largest-S value is returned.
[[nodiscard]] LimitCurve berman_2d_limit_curve(double alpha1, double alpha2, const DriftSpec& drift1,
                                               const DriftSpec& drift2, std::span<const double> xs,
                                               const DomainRule& rule, std::span<const double> schedule,
                                               const McSettings& settings);

// --- mixed sup/sojourn constants --------------------------------------------------

struct BhatEstimate {
    /// Direct Monte Carlo of the mixed functional, normalised by prod n_i and extrapolated.
    ConstantEstimate direct;
    /// prod_{i>=2} H_{alpha_i} * B_{alpha_1}(x, [0, n1]).
    ConstantEstimate product;
    std::vector<ConstantEstimate> direct_per_n;
    std::vector<ConstantEstimate> pickands;
    ConstantEstimate berman_first_axis;
};

[[nodiscard]] BhatEstimate estimate_bhat(std::span<const double> alphas, double x, double n1,
                                         std::span<const double> n_rest_schedule, const McSettings& settings);

// --- deterministic alpha = 2 oracle --------------------------------------------------

/// B_2(x, [0, S]) for W(t) = sqrt(2) xi t - t^2 with one standard normal xi.
/// z_x(xi) is found by monotone bisection on the closed-form sojourn of the
/// parabola and integrated against the normal density with Gauss-Legendre panels
/// split at the kinks of z_x.
[[nodiscard]] double berman2_parabola_oracle(double x, double S, int quadrature_order = 200);

/// Gauss-Legendre nodes and weights on [-1, 1].
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

}  // namespace sojourn
