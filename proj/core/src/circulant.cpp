#include "sojourn/circulant.hpp"

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <sstream>

#include "sojourn/errors.hpp"

namespace sojourn {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans and buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* data = nullptr;
    std::size_t size = 0;

    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {
        if (data == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct FftwPlan {
    fftw_plan plan = nullptr;

    FftwPlan() = default;
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    ~FftwPlan() {
        if (plan != nullptr) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
    // FFTW_ESTIMATE keeps plan selection deterministic, which the
    // bitwise-reproducibility contract relies on.
    void make_1d(FftwBuffer& buf) {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(buf.size), buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    void make_2d(FftwBuffer& buf, std::size_t rows, std::size_t cols) {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf.data, buf.data,
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    void execute() const { fftw_execute(plan); }
};

std::vector<double> circulant_spectrum(const LagCovariance& cov, std::size_t embedding) {
    FftwBuffer buf(embedding);
    FftwPlan plan;
    plan.make_1d(buf);
    const std::size_t half = embedding / 2;
    std::vector<double> first_row(half + 1);
    for (std::size_t k = 0; k <= half; ++k) first_row[k] = cov(k);
    for (std::size_t j = 0; j < embedding; ++j) {
        const std::size_t lag = std::min(j, embedding - j);
        buf.data[j][0] = first_row[lag];
        buf.data[j][1] = 0.0;
    }
    plan.execute();
    std::vector<double> eig(embedding);
    for (std::size_t k = 0; k < embedding; ++k) eig[k] = buf.data[k][0];
    return eig;
}

std::vector<double> dense_covariance(const LagCovariance& cov, std::size_t n) {
    std::vector<double> lags(n);
    for (std::size_t k = 0; k < n; ++k) lags[k] = cov(k);
    std::vector<double> c(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[i * n + j] = lags[i > j ? i - j : j - i];
    return c;
}

}  // namespace

std::size_t fast_fft_size(std::size_t n) noexcept {
    if (n <= 1) return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

std::shared_ptr<const StationaryFactor> StationaryFactor::build_circulant_strict(const LagCovariance& cov,
                                                                                 std::size_t n,
                                                                                 double clip_tolerance) {
    if (n == 0) throw ConfigError("stationary factor: empty sequence");
    const std::size_t embedding = n == 1 ? 2 : fast_fft_size(2 * (n - 1));
    auto eig = circulant_spectrum(cov, embedding);
    const auto [mn, mx] = std::minmax_element(eig.begin(), eig.end());
    const double min_eig = *mn, max_eig = *mx;
    if (!(max_eig > 0.0)) throw EmbeddingError("circulant embedding has no positive eigenvalue", min_eig);
    if (min_eig < -clip_tolerance * max_eig) {
        std::ostringstream msg;
        msg << "circulant embedding of size " << embedding << " is not nonnegative definite"
            << " (most negative eigenvalue " << min_eig << ", max " << max_eig << ")";
        throw EmbeddingError(msg.str(), min_eig);
    }
    std::shared_ptr<StationaryFactor> f(new StationaryFactor());
    f->n_ = n;
    f->report_ = {FactorReport::Method::circulant, embedding, min_eig, max_eig, min_eig < 0.0};
    f->root_spectrum_.resize(embedding);
    const double scale = 1.0 / static_cast<double>(embedding);
    for (std::size_t k = 0; k < embedding; ++k) f->root_spectrum_[k] = std::sqrt(std::max(0.0, eig[k]) * scale);
    return f;
}

std::shared_ptr<const StationaryFactor> StationaryFactor::build_dense(const LagCovariance& cov, std::size_t n,
                                                                      double clip_tolerance) {
    if (n == 0) throw ConfigError("stationary factor: empty sequence");
    const auto c = dense_covariance(cov, n);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> cm(
        c.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cm);
    if (solver.info() != Eigen::Success) throw NumericError("dense covariance eigendecomposition failed");
    const auto& ev = solver.eigenvalues();
    const double min_eig = ev.minCoeff(), max_eig = ev.maxCoeff();
    if (!(max_eig > 0.0)) throw EmbeddingError("covariance matrix has no positive eigenvalue", min_eig);
    if (min_eig < -clip_tolerance * max_eig) {
        std::ostringstream msg;
        msg << "covariance matrix is not nonnegative definite (most negative eigenvalue " << min_eig << ")";
        throw EmbeddingError(msg.str(), min_eig);
    }
    const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd factor = solver.eigenvectors() * root.asDiagonal();

    std::shared_ptr<StationaryFactor> f(new StationaryFactor());
    f->n_ = n;
    f->report_ = {FactorReport::Method::dense, n, min_eig, max_eig, min_eig < 0.0};
    f->dense_root_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            f->dense_root_[i * n + j] = factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return f;
}

std::shared_ptr<const StationaryFactor> StationaryFactor::build(const LagCovariance& cov, std::size_t n,
                                                                const FactorOptions& options) {
    if (n == 0) throw ConfigError("stationary factor: empty sequence");
    double most_negative = 0.0;
    std::string first_failure;
    const std::size_t minimal = n == 1 ? 2 : 2 * (n - 1);
    for (int d = 0; d <= options.max_padding_doublings; ++d) {
        const std::size_t embedding = fast_fft_size(minimal << d);
        auto eig = circulant_spectrum(cov, embedding);
        const auto [mn, mx] = std::minmax_element(eig.begin(), eig.end());
        if (d == 0) most_negative = *mn;
        if (*mx > 0.0 && *mn >= -options.clip_tolerance * *mx) {
            std::shared_ptr<StationaryFactor> f(new StationaryFactor());
            f->n_ = n;
            f->report_ = {FactorReport::Method::circulant, embedding, *mn, *mx, *mn < 0.0};
            f->root_spectrum_.resize(embedding);
            const double scale = 1.0 / static_cast<double>(embedding);
            for (std::size_t k = 0; k < embedding; ++k)
                f->root_spectrum_[k] = std::sqrt(std::max(0.0, eig[k]) * scale);
            return f;
        }
    }
    if (options.dense_limit > 0 && n <= options.dense_limit) return build_dense(cov, n, options.clip_tolerance);
    std::ostringstream msg;
    msg << "no admissible circulant embedding for " << n << " points after " << options.max_padding_doublings
        << " doublings (most negative eigenvalue " << most_negative << ") and grid too large for dense fallback";
    throw EmbeddingError(msg.str(), most_negative);
}

// --- StationarySampler ------------------------------------------------------

struct StationarySampler::Workspace {
    std::unique_ptr<FftwBuffer> buf;
    FftwPlan plan;
    std::vector<double> normals;
    std::vector<double> cached;
    bool has_cached = false;
    StreamId cached_id;
    std::uint64_t cached_position = 0;
};

StationarySampler::StationarySampler(std::shared_ptr<const StationaryFactor> factor)
    : factor_(std::move(factor)), ws_(std::make_unique<Workspace>()) {
    if (factor_->report().method == FactorReport::Method::circulant) {
        const std::size_t m = factor_->scaled_root_spectrum().size();
        ws_->buf = std::make_unique<FftwBuffer>(m);
        ws_->plan.make_1d(*ws_->buf);
        ws_->normals.resize(2 * m);
        ws_->cached.resize(factor_->size());
    } else {
        ws_->normals.resize(factor_->size());
    }
}

StationarySampler::~StationarySampler() = default;
StationarySampler::StationarySampler(StationarySampler&&) noexcept = default;
StationarySampler& StationarySampler::operator=(StationarySampler&&) noexcept = default;

std::size_t StationarySampler::size() const noexcept { return factor_->size(); }

void StationarySampler::sample(StreamRng& rng, std::span<double> out) {
    const std::size_t n = factor_->size();
    if (out.size() != n) throw ConfigError("stationary sampler: output length mismatch");
    auto& ws = *ws_;
    if (factor_->report().method == FactorReport::Method::dense) {
        rng.fill_normal(ws.normals);
        const auto f = factor_->dense_root();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* row = f.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * ws.normals[j];
            out[i] = acc;
        }
        return;
    }
    if (ws.has_cached && rng.id() == ws.cached_id && rng.position() == ws.cached_position) {
        std::copy(ws.cached.begin(), ws.cached.end(), out.begin());
        ws.has_cached = false;
        return;
    }
    const auto root = factor_->scaled_root_spectrum();
    const std::size_t m = root.size();
    rng.fill_normal(ws.normals);
    fftw_complex* data = ws.buf->data;
    for (std::size_t k = 0; k < m; ++k) {
        data[k][0] = root[k] * ws.normals[2 * k];
        data[k][1] = root[k] * ws.normals[2 * k + 1];
    }
    ws.plan.execute();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = data[i][0];
        ws.cached[i] = data[i][1];
    }
    ws.has_cached = true;
    ws.cached_id = rng.id();
    ws.cached_position = rng.position();
}

// --- SeparableFieldSampler --------------------------------------------------

struct SeparableFieldSampler::Workspace {
    bool fft = true;
    std::unique_ptr<FftwBuffer> buf;
    FftwPlan plan;
    std::size_t m1 = 0, m2 = 0;
    std::vector<double> normals;
    std::vector<double> tmp;
    std::vector<double> cached;
    bool has_cached = false;
    StreamId cached_id;
    std::uint64_t cached_position = 0;
    std::shared_ptr<const StationaryFactor> dense1, dense2;
};

SeparableFieldSampler::SeparableFieldSampler(std::shared_ptr<const StationaryFactor> axis1,
                                             std::shared_ptr<const StationaryFactor> axis2)
    : axis1_(std::move(axis1)), axis2_(std::move(axis2)), ws_(std::make_unique<Workspace>()) {
    auto& ws = *ws_;
    const bool circ1 = axis1_->report().method == FactorReport::Method::circulant;
    const bool circ2 = axis2_->report().method == FactorReport::Method::circulant;
    const std::size_t n1 = axis1_->size(), n2 = axis2_->size();
    if (circ1 && circ2) {
        ws.fft = true;
        ws.m1 = axis1_->scaled_root_spectrum().size();
        ws.m2 = axis2_->scaled_root_spectrum().size();
        ws.buf = std::make_unique<FftwBuffer>(ws.m1 * ws.m2);
        ws.plan.make_2d(*ws.buf, ws.m1, ws.m2);
        ws.normals.resize(2 * ws.m1 * ws.m2);
        ws.cached.resize(n1 * n2);
    } else {
        if (circ1 || circ2)
            throw ConfigError("separable field: both axis factors must use the same method");
        ws.fft = false;
        ws.normals.resize(n1 * n2);
        ws.tmp.resize(n1 * n2);
    }
}

SeparableFieldSampler::~SeparableFieldSampler() = default;
SeparableFieldSampler::SeparableFieldSampler(SeparableFieldSampler&&) noexcept = default;
SeparableFieldSampler& SeparableFieldSampler::operator=(SeparableFieldSampler&&) noexcept = default;

std::size_t SeparableFieldSampler::rows() const noexcept { return axis1_->size(); }
std::size_t SeparableFieldSampler::cols() const noexcept { return axis2_->size(); }

void SeparableFieldSampler::sample(StreamRng& rng, std::span<double> out) {
    const std::size_t n1 = rows(), n2 = cols();
    if (out.size() != n1 * n2) throw ConfigError("separable field sampler: output size mismatch");
    auto& ws = *ws_;
    if (!ws.fft) {
        // Y = F1 Z F2^T
        rng.fill_normal(ws.normals);
        const auto f1 = axis1_->dense_root();
        const auto f2 = axis2_->dense_root();
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n1; ++k) acc += f1[i * n1 + k] * ws.normals[k * n2 + j];
                ws.tmp[i * n2 + j] = acc;
            }
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n2; ++k) acc += ws.tmp[i * n2 + k] * f2[j * n2 + k];
                out[i * n2 + j] = acc;
            }
        return;
    }
    if (ws.has_cached && rng.id() == ws.cached_id && rng.position() == ws.cached_position) {
        std::copy(ws.cached.begin(), ws.cached.end(), out.begin());
        ws.has_cached = false;
        return;
    }
    const auto r1 = axis1_->scaled_root_spectrum();
    const auto r2 = axis2_->scaled_root_spectrum();
    rng.fill_normal(ws.normals);
    fftw_complex* data = ws.buf->data;
    for (std::size_t i = 0; i < ws.m1; ++i)
        for (std::size_t j = 0; j < ws.m2; ++j) {
            const std::size_t k = i * ws.m2 + j;
            const double s = r1[i] * r2[j];
            data[k][0] = s * ws.normals[2 * k];
            data[k][1] = s * ws.normals[2 * k + 1];
        }
    ws.plan.execute();
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            out[i * n2 + j] = data[i * ws.m2 + j][0];
            ws.cached[i * n2 + j] = data[i * ws.m2 + j][1];
        }
    ws.has_cached = true;
    ws.cached_id = rng.id();
    ws.cached_position = rng.position();
}

}  // namespace sojourn
