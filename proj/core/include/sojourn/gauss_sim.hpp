#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "sojourn/circulant.hpp"
#include "sojourn/grid.hpp"
#include "sojourn/rng.hpp"

namespace sojourn {

/// Drift h(t) = b |t|^beta; b = 0 encodes h == 0.
struct DriftSpec {
    double coefficient = 0.0;
    double exponent = 1.0;

    [[nodiscard]] double operator()(double t) const noexcept;
    [[nodiscard]] bool is_zero() const noexcept { return coefficient == 0.0; }
    void validate() const;

    friend bool operator==(const DriftSpec&, const DriftSpec&) = default;
};

namespace process {

/// W(t) = sqrt(2) B_alpha(t) - |t|^alpha - h(t).
struct FbmW {
    double alpha = 1.0;
    DriftSpec drift{};
};

/// Centred, unit variance, r(t) = exp(-a |t|^alpha).
struct StationaryExp1D {
    double a = 1.0;
    double alpha = 1.0;
};

/// r(s, t) = exp(-a1 |s1 - t1|^alpha1 - a2 |s2 - t2|^alpha2).
struct StationaryExp2D {
    double a1 = 1.0, a2 = 1.0;
    double alpha1 = 1.0, alpha2 = 1.0;
};

/// X(t) = sigma(t) Y(t), sigma(t) = exp(-b1 |t1 - t1*|^beta1 - b2 |t2 - t2*|^beta2).
struct ScaledVariance2D {
    StationaryExp2D base{};
    double b1 = 1.0, b2 = 1.0;
    double beta1 = 2.0, beta2 = 2.0;
    double t1_star = 0.0, t2_star = 0.0;

    [[nodiscard]] double sigma(double t1, double t2) const noexcept;
};

/// chi(t) = sqrt(sum_{i<m} X_i(t)^2) for iid copies of the base process.
struct Chi {
    int m = 1;
    StationaryExp1D base{};
};

/// Q(t) = sup_{t <= s <= t + H} (B(s) - B(t) - c (s - t)) with H = horizon_mult * tau* * u_ref.
struct Queue {
    double alpha = 1.0;
    double c = 1.0;
    double horizon_mult = 5.0;
    double u_ref = 1.0;

    [[nodiscard]] double tau_star() const noexcept;
    [[nodiscard]] double horizon() const noexcept { return horizon_mult * tau_star() * u_ref; }
};

}  // namespace process

using ProcessSpec = std::variant<process::FbmW, process::StationaryExp1D, process::StationaryExp2D,
                                 process::ScaledVariance2D, process::Chi, process::Queue>;

/// Throws ConfigError when a parameter is out of range.
void validate(const ProcessSpec& spec);
[[nodiscard]] bool is_field(const ProcessSpec& spec) noexcept;

/// Samples fBm B_alpha on a grid, pinned to zero at grid node `anchor`.
/// alpha == 0 yields the zero process.
class FbmSampler {
public:
    FbmSampler(double alpha, const GridSpec& grid, std::size_t anchor = 0, const FactorOptions& options = {});

    /// Shares the increment factor of `other` for a new worker.
    [[nodiscard]] FbmSampler clone() const;

    void sample(StreamRng& rng, std::span<double> out);
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t anchor() const noexcept { return anchor_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const FactorReport* factor_report() const noexcept;

private:
    FbmSampler(double alpha, const GridSpec& grid, std::size_t anchor,
               std::shared_ptr<const StationaryFactor> factor);

    double alpha_;
    GridSpec grid_;
    std::size_t anchor_;
    std::shared_ptr<const StationaryFactor> factor_;
    std::unique_ptr<StationarySampler> increments_;
    std::vector<double> scratch_;
};

/// Autocovariance of fractional Gaussian noise with step `dt`: Cov(B(t_{k+1}) - B(t_k), B(t_1) - B(t_0)).
[[nodiscard]] double fgn_autocovariance(double alpha, double dt, std::size_t lag) noexcept;

/// Reusable sampler of a one-dimensional ProcessSpec on a grid (FbmW, StationaryExp1D, Chi, Queue).
class PathSampler {
public:
    PathSampler(const ProcessSpec& spec, const GridSpec& grid, const FactorOptions& options = {});
    ~PathSampler();
    PathSampler(PathSampler&&) noexcept;
    PathSampler& operator=(PathSampler&&) noexcept;

    [[nodiscard]] PathSampler clone() const;

    void sample(StreamRng& rng, std::span<double> out);
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }

private:
    struct Impl;
    PathSampler(const ProcessSpec& spec, const GridSpec& grid, std::unique_ptr<Impl> impl);

    ProcessSpec spec_;
    GridSpec grid_;
    std::unique_ptr<Impl> impl_;
};

/// Reusable sampler of a two-dimensional ProcessSpec on a lattice (StationaryExp2D, ScaledVariance2D).
class FieldSampler {
public:
    FieldSampler(const ProcessSpec& spec, const Lattice2D& lattice, const FactorOptions& options = {});

    [[nodiscard]] FieldSampler clone() const;

    void sample(StreamRng& rng, std::span<double> out);
    [[nodiscard]] const Lattice2D& lattice() const noexcept { return lattice_; }

private:
    FieldSampler(const ProcessSpec& spec, const Lattice2D& lattice,
                 std::shared_ptr<const StationaryFactor> f1, std::shared_ptr<const StationaryFactor> f2);

    ProcessSpec spec_;
    Lattice2D lattice_;
    std::shared_ptr<const StationaryFactor> f1_, f2_;
    std::unique_ptr<SeparableFieldSampler> sampler_;
    std::vector<double> sigma_;
};

/// Exact-in-law fBm on a grid starting at 0.
[[nodiscard]] SamplePath simulate_fbm(double alpha, const GridSpec& grid, std::uint64_t seed);

using Domain = std::variant<GridSpec, Lattice2D>;
using Realisation = std::variant<SamplePath, Field2D>;

[[nodiscard]] Realisation simulate_process(const ProcessSpec& spec, const Domain& domain, std::uint64_t seed);
[[nodiscard]] SamplePath simulate_path(const ProcessSpec& spec, const GridSpec& grid, std::uint64_t seed);
[[nodiscard]] Field2D simulate_field(const ProcessSpec& spec, const Lattice2D& lattice, std::uint64_t seed);

}  // namespace sojourn
