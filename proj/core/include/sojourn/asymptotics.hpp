#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sojourn/berman.hpp"
#include "sojourn/gauss_sim.hpp"

namespace sojourn {

namespace family {

/// Stationary process with 1 - r(t) ~ a |t|^alpha; v(u) = a^{-1/alpha} u^{-2/alpha}.
struct Stationary1D {
    double a = 1.0;
    double alpha = 1.0;
};

/// Separable stationary field on [0, T1] x [0, T2].
struct Stationary2D {
    double a1 = 1.0, a2 = 1.0;
    double alpha1 = 1.0, alpha2 = 1.0;
};

/// Field with a unique variance maximum at the origin of [-T1, T1] x [-T2, T2].
struct OnePoint2D {
    double a1 = 1.0, a2 = 1.0;
    double alpha1 = 1.0, alpha2 = 1.0;
    double b1 = 1.0, b2 = 1.0;
    double beta1 = 2.0, beta2 = 2.0;
};

/// Chi-process of degree m over a stationary base.
struct Chi {
    double a = 1.0;
    double alpha = 1.0;
    int m = 1;
};

struct Queue {
    double alpha = 1.0;
    double c = 1.0;
};

}  // namespace family

using ScalingFamily =
    std::variant<family::Stationary1D, family::Stationary2D, family::OnePoint2D, family::Chi, family::Queue>;

void validate(const ScalingFamily& f);
[[nodiscard]] std::string family_name(const ScalingFamily& f);

/// Normalising volume v(u) of the sojourn time.
[[nodiscard]] double scaling_function(const ScalingFamily& f, double u);

/// Per-axis local scale l_i(u); v(u) is their product.
[[nodiscard]] std::vector<double> local_scales(const ScalingFamily& f, double u);

/// Target constant of the two-dimensional variance-maximum family: alpha-hat, drift
/// a-bar_i b_i |t|^beta_i and the domain rule built from the original (alpha_i, beta_i).
struct OnePointTarget {
    std::array<double, 2> alpha_hat{};
    std::array<DriftSpec, 2> drift{};
    DomainRule rule{};
    std::array<bool, 2> degenerate{};  // alpha_i > beta_i: pure-drift axis
};

[[nodiscard]] OnePointTarget onepoint_target(const family::OnePoint2D& f, double S = 1.0);

enum class QueueCase { bounded, growing };

struct ExperimentSettings {
    /// Domain size in units of the family's natural domain: [0, T1] (x [0, T2]) for the
    /// stationary and chi families, [-T1, T1] x [-T2, T2] for OnePoint2D, T in units
    /// of v(u) for the queue (T_u = v(u) T1 in both queue cases).
    double T1 = 2.0;
    double T2 = 2.0;
    QueueCase queue_case = QueueCase::bounded;
    double queue_horizon_mult = 5.0;

    /// Grid step in units of the local scale l_i(u); the target uses the same step.
    double delta = 0.05;
    std::size_t n_target_conditioned = 2000;
    std::size_t max_paths = 5'000'000;
    std::size_t chunk_size = 2000;
    std::size_t min_conditioned = 500;
    std::uint64_t seed = 0;
    unsigned workers = 1;

    /// Target constants.
    std::size_t target_samples = 20000;
    std::vector<double> target_schedule{4.0, 8.0, 16.0};
    Sampler target_sampler = Sampler::tilted;

    void validate() const;
};

struct TargetCurve {
    std::vector<double> xs;
    std::vector<double> ratio;
    std::vector<double> ratio_se;
    std::vector<std::string> flags;
};

struct ExperimentResult {
    std::string family;
    double u = 0.0;
    double v_u = 0.0;
    std::vector<double> x_grid;
    std::vector<double> ratio_hat;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::vector<double> ci_halfwidth;
    std::size_t n_conditioned = 0;
    std::size_t n_paths = 0;
    std::size_t chunks_used = 0;
    std::vector<double> target;
    std::vector<double> target_se;
    double sup_distance = 0.0;
    /// x values removed from the grid (queue case with x at the domain end).
    std::vector<double> excluded_x;
    std::vector<std::string> flags;
    std::vector<std::string> notes;
    std::uint64_t seed = 0;
    std::uint64_t purpose = 0;
    std::vector<GridSpec> grids;
    double runtime_seconds = 0.0;
};

/// B(x)/B(0) conditional-limit target of the family, estimated on the lattice step delta.
[[nodiscard]] TargetCurve target_curve(const ScalingFamily& f, const ExperimentSettings& s,
                                       std::span<const double> x_grid);

/// Empirical P(Vol > v(u) x | sup > u) by crude conditioning at one level, paired with `target`.
[[nodiscard]] ExperimentResult conditional_sojourn_cdf(const ScalingFamily& f, const ExperimentSettings& s, double u,
                                                       std::span<const double> x_grid, const TargetCurve& target);

/// Estimates the target once and runs conditional_sojourn_cdf at every level.
[[nodiscard]] std::vector<ExperimentResult> conditional_sojourn_ladder(const ScalingFamily& f,
                                                                       const ExperimentSettings& s,
                                                                       std::span<const double> levels,
                                                                       std::span<const double> x_grid);

/// True when sup_distance does not increase along the ladder.
[[nodiscard]] bool sup_distance_nonincreasing(std::span<const ExperimentResult> ladder) noexcept;

// --- double-sum diagnostic -----------------------------------------------------------

struct DoubleSumSettings {
    double u = 3.0;
    /// Domain [0, T] (or [0, T]^2) in the original time units.
    double T = 4.0;
    std::vector<double> n_schedule{2.0, 4.0, 8.0};
    /// Grid step in units of the local scale.
    double delta = 0.05;
    std::size_t n_paths = 100000;
    std::size_t chunk_size = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    /// Simulate every block independently (control with no dependence between blocks).
    bool independent_blocks = false;

    void validate() const;
};

struct DoubleSumPoint {
    double n = 0.0;
    std::size_t blocks = 0;
    /// Sum_k P(sup_{I_k} X > u).
    double single_sum = 0.0;
    /// Sum_{k != l} P(sup_{I_k} X > u, sup_{I_l} X > u).
    double double_sum = 0.0;
    double ratio = 0.0;
    double ratio_se = 0.0;
    double max_block_probability = 0.0;
    /// (K - 1) max_k P(sup_{I_k} X > u): the value of the ratio under independence is below this.
    double independence_bound = 0.0;
};

struct DoubleSumResult {
    std::string family;
    double u = 0.0;
    bool independent_blocks = false;
    std::vector<DoubleSumPoint> points;
    [[nodiscard]] bool ratio_decreasing() const noexcept;
};

/// Monte Carlo of the double-sum ratio over block partitions of side n l(u), for
/// Stationary1D and Stationary2D families. Blocks are half-open index ranges.
[[nodiscard]] DoubleSumResult double_sum_diagnostic(const ScalingFamily& f, const DoubleSumSettings& s);

}  // namespace sojourn
