#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sojourn/rng.hpp"

namespace sojourn {

/// Autocovariance of a stationary sequence as a function of the integer lag.
using LagCovariance = std::function<double(std::size_t lag)>;

struct FactorOptions {
    /// Negative eigenvalues above -clip_tolerance * max eigenvalue are set to zero.
    double clip_tolerance = 1e-9;
    /// Embedding sizes tried: minimal, then doubled this many times.
    int max_padding_doublings = 3;
    /// Dense eigen-factorisation is attempted for sequences up to this length
    /// when no circulant embedding is admissible. Zero disables the fallback.
    std::size_t dense_limit = 2048;
};

struct FactorReport {
    enum class Method { circulant, dense };
    Method method = Method::circulant;
    std::size_t embedding_size = 0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool clipped = false;
};

/// Immutable square-root factor of the covariance of a length-n stationary
/// Gaussian sequence. Shared read-only between workers.
class StationaryFactor {
public:
    /// Builds the factor, preferring circulant embedding. Throws EmbeddingError
    /// (carrying the most negative eigenvalue of the minimal embedding) when neither
    /// a circulant embedding nor the dense fallback is admissible.
    static std::shared_ptr<const StationaryFactor> build(const LagCovariance& cov, std::size_t n,
                                                         const FactorOptions& options = {});

    /// Circulant embedding only, with no padding and no dense fallback.
    static std::shared_ptr<const StationaryFactor> build_circulant_strict(const LagCovariance& cov, std::size_t n,
                                                                          double clip_tolerance = 1e-9);

    /// Dense eigen-factorisation only.
    static std::shared_ptr<const StationaryFactor> build_dense(const LagCovariance& cov, std::size_t n,
                                                               double clip_tolerance = 1e-9);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] const FactorReport& report() const noexcept { return report_; }

    // Circulant data: sqrt(lambda_k / M), k < M.
    [[nodiscard]] std::span<const double> scaled_root_spectrum() const noexcept { return root_spectrum_; }
    // Dense data: n x n row-major matrix F with F F^T = covariance.
    [[nodiscard]] std::span<const double> dense_root() const noexcept { return dense_root_; }

private:
    StationaryFactor() = default;

    std::size_t n_ = 0;
    FactorReport report_;
    std::vector<double> root_spectrum_;
    std::vector<double> dense_root_;
};

/// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
[[nodiscard]] std::size_t fast_fft_size(std::size_t n) noexcept;

/// Per-worker sampler of a stationary Gaussian sequence. Owns its FFT scratch.
///
/// A circulant draw produces two independent sequences; the second one is kept
/// and handed out on the next call only if that call continues the same stream
/// at the same position, so output never depends on which worker ran before.
class StationarySampler {
public:
    explicit StationarySampler(std::shared_ptr<const StationaryFactor> factor);
    ~StationarySampler();
    StationarySampler(StationarySampler&&) noexcept;
    StationarySampler& operator=(StationarySampler&&) noexcept;
    StationarySampler(const StationarySampler&) = delete;
    StationarySampler& operator=(const StationarySampler&) = delete;

    void sample(StreamRng& rng, std::span<double> out);
    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] const StationaryFactor& factor() const noexcept { return *factor_; }

private:
    struct Workspace;

    std::shared_ptr<const StationaryFactor> factor_;
    std::unique_ptr<Workspace> ws_;
};

/// Per-worker sampler of a zero-mean field on an n1 x n2 lattice whose covariance
/// is the Kronecker product of two stationary axis covariances.
class SeparableFieldSampler {
public:
    SeparableFieldSampler(std::shared_ptr<const StationaryFactor> axis1,
                          std::shared_ptr<const StationaryFactor> axis2);
    ~SeparableFieldSampler();
    SeparableFieldSampler(SeparableFieldSampler&&) noexcept;
    SeparableFieldSampler& operator=(SeparableFieldSampler&&) noexcept;
    SeparableFieldSampler(const SeparableFieldSampler&) = delete;
    SeparableFieldSampler& operator=(const SeparableFieldSampler&) = delete;

    /// Fills `out` (row-major, axis1 slow) with one field.
    void sample(StreamRng& rng, std::span<double> out);
    [[nodiscard]] std::size_t rows() const noexcept;
    [[nodiscard]] std::size_t cols() const noexcept;

private:
    struct Workspace;

    std::shared_ptr<const StationaryFactor> axis1_;
    std::shared_ptr<const StationaryFactor> axis2_;
    std::unique_ptr<Workspace> ws_;
};

}  // namespace sojourn
