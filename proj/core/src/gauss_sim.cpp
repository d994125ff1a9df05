#include "sojourn/gauss_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>

#include "sojourn/errors.hpp"

namespace sojourn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void validate_hurst(double alpha, const char* name, bool allow_two = true) {
    require(std::isfinite(alpha) && alpha > 0.0 && (allow_two ? alpha <= 2.0 : alpha < 2.0),
            std::string(name) + (allow_two ? " must lie in (0, 2]" : " must lie in (0, 2)"));
}

void validate_base(const process::StationaryExp1D& p) {
    require(std::isfinite(p.a) && p.a > 0.0, "stationary: a must be positive");
    validate_hurst(p.alpha, "stationary: alpha");
}

void validate_base(const process::StationaryExp2D& p) {
    require(std::isfinite(p.a1) && p.a1 > 0.0 && std::isfinite(p.a2) && p.a2 > 0.0,
            "stationary2d: a1 and a2 must be positive");
    validate_hurst(p.alpha1, "stationary2d: alpha1");
    validate_hurst(p.alpha2, "stationary2d: alpha2");
}

LagCovariance exp_covariance(double a, double alpha, double dt) {
    return [a, alpha, dt](std::size_t lag) {
        return std::exp(-a * std::pow(static_cast<double>(lag) * dt, alpha));
    };
}

// Index offset of the grid start in units of the step, if the start is a node multiple.
long aligned_offset(const GridSpec& grid) {
    const double dt = grid.step();
    const double k = std::round(grid.start / dt);
    if (std::abs(grid.start - k * dt) > 1e-9 * std::max(1.0, std::abs(grid.start)))
        throw ConfigError("grid start must be an integer multiple of the step so that t = 0 is a node");
    return static_cast<long>(k);
}

}  // namespace

double DriftSpec::operator()(double t) const noexcept {
    if (coefficient == 0.0) return 0.0;
    return coefficient * std::pow(std::abs(t), exponent);
}

void DriftSpec::validate() const {
    require(std::isfinite(coefficient) && coefficient >= 0.0, "drift: coefficient must be >= 0");
    require(std::isfinite(exponent) && exponent > 0.0, "drift: exponent must be > 0");
}

double process::ScaledVariance2D::sigma(double t1, double t2) const noexcept {
    return std::exp(-b1 * std::pow(std::abs(t1 - t1_star), beta1) - b2 * std::pow(std::abs(t2 - t2_star), beta2));
}

double process::Queue::tau_star() const noexcept { return alpha / (c * (2.0 - alpha)); }

void validate(const ProcessSpec& spec) {
    std::visit(overloaded{
                   [](const process::FbmW& p) {
                       validate_hurst(p.alpha, "fbm_w: alpha");
                       p.drift.validate();
                   },
                   [](const process::StationaryExp1D& p) { validate_base(p); },
                   [](const process::StationaryExp2D& p) { validate_base(p); },
                   [](const process::ScaledVariance2D& p) {
                       validate_base(p.base);
                       require(p.b1 > 0.0 && p.b2 > 0.0, "scaled_variance: b1 and b2 must be positive");
                       require(p.beta1 > 0.0 && p.beta2 > 0.0, "scaled_variance: beta1 and beta2 must be positive");
                       require(std::isfinite(p.t1_star) && std::isfinite(p.t2_star),
                               "scaled_variance: t* must be finite");
                   },
                   [](const process::Chi& p) {
                       require(p.m >= 1, "chi: m must be >= 1");
                       validate_base(p.base);
                   },
                   [](const process::Queue& p) {
                       validate_hurst(p.alpha, "queue: alpha", false);
                       require(std::isfinite(p.c) && p.c > 0.0, "queue: c must be positive");
                       require(std::isfinite(p.horizon_mult) && p.horizon_mult > 0.0,
                               "queue: horizon_mult must be positive");
                       require(std::isfinite(p.u_ref) && p.u_ref > 0.0, "queue: u_ref must be positive");
                   },
               },
               spec);
}

bool is_field(const ProcessSpec& spec) noexcept {
    return std::holds_alternative<process::StationaryExp2D>(spec) ||
           std::holds_alternative<process::ScaledVariance2D>(spec);
}

double fgn_autocovariance(double alpha, double dt, std::size_t lag) noexcept {
    const double k = static_cast<double>(lag);
    const double g = std::pow(k + 1.0, alpha) - 2.0 * std::pow(k, alpha) + std::pow(std::abs(k - 1.0), alpha);
    return 0.5 * std::pow(dt, alpha) * g;
}

// --- FbmSampler ---------------------------------------------------------------

FbmSampler::FbmSampler(double alpha, const GridSpec& grid, std::size_t anchor, const FactorOptions& options)
    : alpha_(alpha), grid_(grid), anchor_(anchor) {
    grid_.validate();
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 2.0, "fbm: alpha must lie in [0, 2]");
    require(anchor < grid.n_points, "fbm: anchor outside grid");
    if (alpha_ > 0.0 && alpha_ < 2.0) {
        const double dt = grid_.step();
        factor_ = StationaryFactor::build([a = alpha_, dt](std::size_t lag) { return fgn_autocovariance(a, dt, lag); },
                                          grid_.n_points - 1, options);
        increments_ = std::make_unique<StationarySampler>(factor_);
        scratch_.resize(grid_.n_points - 1);
    }
}

FbmSampler::FbmSampler(double alpha, const GridSpec& grid, std::size_t anchor,
                       std::shared_ptr<const StationaryFactor> factor)
    : alpha_(alpha), grid_(grid), anchor_(anchor), factor_(std::move(factor)) {
    if (factor_) {
        increments_ = std::make_unique<StationarySampler>(factor_);
        scratch_.resize(grid_.n_points - 1);
    }
}

FbmSampler FbmSampler::clone() const { return FbmSampler(alpha_, grid_, anchor_, factor_); }

const FactorReport* FbmSampler::factor_report() const noexcept { return factor_ ? &factor_->report() : nullptr; }

void FbmSampler::sample(StreamRng& rng, std::span<double> out) {
    const std::size_t n = grid_.n_points;
    if (out.size() != n) throw ConfigError("fbm: output length mismatch");
    if (alpha_ == 2.0) {
        // B_2(t) = xi t exactly.
        const double xi = rng.normal();
        const double t0 = grid_.at(anchor_);
        for (std::size_t i = 0; i < n; ++i) out[i] = xi * (grid_.at(i) - t0);
        out[anchor_] = 0.0;
        return;
    }
    if (!factor_) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    increments_->sample(rng, scratch_);
    out[anchor_] = 0.0;
    for (std::size_t i = anchor_; i + 1 < n; ++i) out[i + 1] = out[i] + scratch_[i];
    for (std::size_t i = anchor_; i > 0; --i) out[i - 1] = out[i] - scratch_[i - 1];
}

// --- PathSampler ---------------------------------------------------------------

struct PathSampler::Impl {
    // FbmW / Queue
    std::unique_ptr<FbmSampler> fbm;
    std::size_t offset = 0;  // index of the requested grid start inside the fbm grid
    std::vector<double> fbm_values;
    std::vector<double> deterministic;  // -|t|^alpha - h(t) for FbmW
    // StationaryExp1D / Chi
    std::shared_ptr<const StationaryFactor> factor;
    std::unique_ptr<StationarySampler> stationary;
    std::vector<double> scratch;
    // Queue
    std::size_t horizon_steps = 0;
    std::deque<std::size_t> window;

    [[nodiscard]] std::unique_ptr<Impl> clone() const {
        auto c = std::make_unique<Impl>();
        if (fbm) c->fbm = std::make_unique<FbmSampler>(fbm->clone());
        c->offset = offset;
        c->fbm_values.resize(fbm_values.size());
        c->deterministic = deterministic;
        c->factor = factor;
        if (factor) c->stationary = std::make_unique<StationarySampler>(factor);
        c->scratch.resize(scratch.size());
        c->horizon_steps = horizon_steps;
        return c;
    }
};

PathSampler::PathSampler(const ProcessSpec& spec, const GridSpec& grid, std::unique_ptr<Impl> impl)
    : spec_(spec), grid_(grid), impl_(std::move(impl)) {}

PathSampler::~PathSampler() = default;
PathSampler::PathSampler(PathSampler&&) noexcept = default;
PathSampler& PathSampler::operator=(PathSampler&&) noexcept = default;

PathSampler PathSampler::clone() const { return PathSampler(spec_, grid_, impl_->clone()); }

PathSampler::PathSampler(const ProcessSpec& spec, const GridSpec& grid, const FactorOptions& options)
    : spec_(spec), grid_(grid), impl_(std::make_unique<Impl>()) {
    validate(spec_);
    grid_.validate();
    if (is_field(spec_)) throw ConfigError("path sampler: field process requires a Lattice2D");
    const double dt = grid_.step();
    const std::size_t n = grid_.n_points;
    auto& im = *impl_;
    std::visit(overloaded{
                   [&](const process::FbmW& p) {
                       const long k0 = aligned_offset(grid_);
                       const long lo = std::min(k0, 0L);
                       const long hi = std::max(k0 + static_cast<long>(n) - 1, 0L);
                       const GridSpec ext{static_cast<double>(lo) * dt, static_cast<double>(hi) * dt,
                                          static_cast<std::size_t>(hi - lo + 1)};
                       im.fbm = std::make_unique<FbmSampler>(p.alpha, ext, static_cast<std::size_t>(-lo), options);
                       im.offset = static_cast<std::size_t>(k0 - lo);
                       im.fbm_values.resize(ext.n_points);
                       im.deterministic.resize(n);
                       for (std::size_t i = 0; i < n; ++i) {
                           const double t = grid_.at(i);
                           im.deterministic[i] = -std::pow(std::abs(t), p.alpha) - p.drift(t);
                       }
                   },
                   [&](const process::StationaryExp1D& p) {
                       im.factor = StationaryFactor::build(exp_covariance(p.a, p.alpha, dt), n, options);
                       im.stationary = std::make_unique<StationarySampler>(im.factor);
                   },
                   [&](const process::Chi& p) {
                       im.factor = StationaryFactor::build(exp_covariance(p.base.a, p.base.alpha, dt), n, options);
                       im.stationary = std::make_unique<StationarySampler>(im.factor);
                       im.scratch.resize(n);
                   },
                   [&](const process::Queue& p) {
                       im.horizon_steps = static_cast<std::size_t>(std::ceil(p.horizon() / dt - 1e-9));
                       const std::size_t total = n + im.horizon_steps;
                       const GridSpec ext{0.0, static_cast<double>(total - 1) * dt, total};
                       im.fbm = std::make_unique<FbmSampler>(p.alpha, ext, 0, options);
                       im.fbm_values.resize(total);
                   },
                   [](const auto&) {},
               },
               spec_);
}

void PathSampler::sample(StreamRng& rng, std::span<double> out) {
    const std::size_t n = grid_.n_points;
    if (out.size() != n) throw ConfigError("path sampler: output length mismatch");
    auto& im = *impl_;
    std::visit(overloaded{
                   [&](const process::FbmW&) {
                       im.fbm->sample(rng, im.fbm_values);
                       for (std::size_t i = 0; i < n; ++i)
                           out[i] = std::numbers::sqrt2 * im.fbm_values[im.offset + i] + im.deterministic[i];
                   },
                   [&](const process::StationaryExp1D&) { im.stationary->sample(rng, out); },
                   [&](const process::Chi& p) {
                       std::fill(out.begin(), out.end(), 0.0);
                       for (int k = 0; k < p.m; ++k) {
                           im.stationary->sample(rng, im.scratch);
                           for (std::size_t i = 0; i < n; ++i) out[i] += im.scratch[i] * im.scratch[i];
                       }
                       for (auto& v : out) v = std::sqrt(v);
                   },
                   [&](const process::Queue& p) {
                       im.fbm->sample(rng, im.fbm_values);
                       const double dt = grid_.step();
                       auto& y = im.fbm_values;
                       for (std::size_t j = 0; j < y.size(); ++j) y[j] -= p.c * static_cast<double>(j) * dt;
                       // Sliding maximum of y over [i, i + h], scanned right to left.
                       auto& dq = im.window;
                       dq.clear();
                       const std::size_t h = im.horizon_steps;
                       for (std::size_t jj = y.size(); jj-- > 0;) {
                           while (!dq.empty() && y[dq.back()] <= y[jj]) dq.pop_back();
                           dq.push_back(jj);
                           while (dq.front() > jj + h) dq.pop_front();
                           if (jj < n) out[jj] = y[dq.front()] - y[jj];
                       }
                   },
                   [](const auto&) {},
               },
               spec_);
}

// --- FieldSampler --------------------------------------------------------------

FieldSampler::FieldSampler(const ProcessSpec& spec, const Lattice2D& lattice,
                           std::shared_ptr<const StationaryFactor> f1, std::shared_ptr<const StationaryFactor> f2)
    : spec_(spec), lattice_(lattice), f1_(std::move(f1)), f2_(std::move(f2)) {
    sampler_ = std::make_unique<SeparableFieldSampler>(f1_, f2_);
    if (const auto* sv = std::get_if<process::ScaledVariance2D>(&spec_)) {
        sigma_.resize(lattice_.size());
        for (std::size_t i = 0; i < lattice_.axis1.n_points; ++i)
            for (std::size_t j = 0; j < lattice_.axis2.n_points; ++j)
                sigma_[i * lattice_.axis2.n_points + j] = sv->sigma(lattice_.axis1.at(i), lattice_.axis2.at(j));
    }
}

FieldSampler::FieldSampler(const ProcessSpec& spec, const Lattice2D& lattice, const FactorOptions& options)
    : spec_(spec), lattice_(lattice) {
    validate(spec_);
    lattice_.validate();
    if (!is_field(spec_)) throw ConfigError("field sampler: process is one-dimensional");
    const process::StationaryExp2D base = std::holds_alternative<process::StationaryExp2D>(spec_)
                                              ? std::get<process::StationaryExp2D>(spec_)
                                              : std::get<process::ScaledVariance2D>(spec_).base;
    const auto c1 = exp_covariance(base.a1, base.alpha1, lattice_.axis1.step());
    const auto c2 = exp_covariance(base.a2, base.alpha2, lattice_.axis2.step());
    f1_ = StationaryFactor::build(c1, lattice_.axis1.n_points, options);
    f2_ = StationaryFactor::build(c2, lattice_.axis2.n_points, options);
    if (f1_->report().method != f2_->report().method) {
        if (f1_->report().method == FactorReport::Method::circulant)
            f1_ = StationaryFactor::build_dense(c1, lattice_.axis1.n_points, options.clip_tolerance);
        else
            f2_ = StationaryFactor::build_dense(c2, lattice_.axis2.n_points, options.clip_tolerance);
    }
    *this = FieldSampler(spec_, lattice_, f1_, f2_);
}

FieldSampler FieldSampler::clone() const { return FieldSampler(spec_, lattice_, f1_, f2_); }

void FieldSampler::sample(StreamRng& rng, std::span<double> out) {
    sampler_->sample(rng, out);
    if (!sigma_.empty())
        for (std::size_t k = 0; k < out.size(); ++k) out[k] *= sigma_[k];
}

// --- one-shot API ----------------------------------------------------------------

SamplePath simulate_fbm(double alpha, const GridSpec& grid, std::uint64_t seed) {
    grid.validate();
    require(grid.start == 0.0, "simulate_fbm: grid must start at 0");
    validate_hurst(alpha, "simulate_fbm: alpha");
    FbmSampler sampler(alpha, grid, 0);
    StreamRng rng(StreamId{seed, 0, 0});
    SamplePath path{grid, std::vector<double>(grid.n_points)};
    sampler.sample(rng, path.values);
    return path;
}

SamplePath simulate_path(const ProcessSpec& spec, const GridSpec& grid, std::uint64_t seed) {
    PathSampler sampler(spec, grid);
    StreamRng rng(StreamId{seed, 0, 0});
    SamplePath path{grid, std::vector<double>(grid.n_points)};
    sampler.sample(rng, path.values);
    return path;
}

Field2D simulate_field(const ProcessSpec& spec, const Lattice2D& lattice, std::uint64_t seed) {
    FieldSampler sampler(spec, lattice);
    StreamRng rng(StreamId{seed, 0, 0});
    Field2D field{lattice, std::vector<double>(lattice.size())};
    sampler.sample(rng, field.values);
    return field;
}

Realisation simulate_process(const ProcessSpec& spec, const Domain& domain, std::uint64_t seed) {
    return std::visit(overloaded{
                          [&](const GridSpec& g) -> Realisation { return simulate_path(spec, g, seed); },
                          [&](const Lattice2D& l) -> Realisation { return simulate_field(spec, l, seed); },
                      },
                      domain);
}

}  // namespace sojourn
