#include "sojourn/berman.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>

#include "sojourn/errors.hpp"
#include "sojourn/parallel.hpp"
#include "sojourn/sojourn.hpp"

namespace sojourn {

void McSettings::validate() const {
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw ConfigError("grid_step must be positive");
    if (n_samples < 100) throw ConfigError("n_samples must be at least 100");
}

bool ConstantEstimate::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::pair<double, double> CurveEstimate::ratio_to_first(std::size_t k) const noexcept { return batches.ratio(k, 0); }

DomainRule DomainRule::from_exponents(double S, double alpha1, double beta1, double alpha2, double beta2) {
    DomainRule r{S, {alpha1 >= beta1, alpha2 >= beta2}};
    r.validate();
    return r;
}

int DomainRule::normalization_exponent() const noexcept {
    return static_cast<int>(!two_sided[0]) + static_cast<int>(!two_sided[1]);
}

double DomainRule::normalization() const noexcept { return std::pow(S, normalization_exponent()); }

Rectangle DomainRule::rectangle() const noexcept {
    return {{two_sided[0] ? -S : 0.0, S}, {two_sided[1] ? -S : 0.0, S}};
}

void DomainRule::validate() const {
    if (!(S > 0.0) || !std::isfinite(S)) throw ConfigError("domain rule: S must be positive");
}

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

struct AxisSpec {
    double alpha = 1.0;
    DriftSpec drift{};
    Interval interval{};
    bool sup = false;  // contributes sup_t W(t) instead of a sojourn coordinate
};

// Per-axis sampling state. One prototype is built per estimation; workers clone it.
class Axis {
public:
    Axis(const AxisSpec& spec, double step, Sampler sampler) : spec_(spec), sampler_(sampler) {
        if (!(spec.interval.hi > spec.interval.lo)) throw ConfigError("interval: hi must exceed lo");
        grid_ = GridSpec::with_step(spec.interval.lo, spec.interval.hi, step);
        const std::size_t n = grid_.n_points;
        const double dt = grid_.step();
        drift_.resize(n);
        for (std::size_t i = 0; i < n; ++i) drift_[i] = spec.drift(grid_.at(i));
        v0_.resize(n);
        w_.resize(n);
        if (degenerate()) return;
        if (sampler == Sampler::tilted) {
            fbm_ = std::make_unique<FbmSampler>(spec.alpha, grid_, 0);
            lag_pow_.resize(n);
            for (std::size_t k = 0; k < n; ++k) lag_pow_[k] = std::pow(static_cast<double>(k) * dt, spec.alpha);
            b_.resize(n);
        } else {
            const double k0d = grid_.start / dt;
            const double k0r = std::round(k0d);
            if (std::abs(k0d - k0r) > 1e-6)
                throw ConfigError("plain sampler: the grid on the domain must contain t = 0 or be aligned with it");
            const long k0 = static_cast<long>(k0r);
            const long lo = std::min(k0, 0L);
            const long hi = std::max(k0 + static_cast<long>(n) - 1, 0L);
            const GridSpec ext{static_cast<double>(lo) * dt, static_cast<double>(hi) * dt,
                               static_cast<std::size_t>(hi - lo + 1)};
            fbm_ = std::make_unique<FbmSampler>(spec.alpha, ext, static_cast<std::size_t>(-lo));
            offset_ = static_cast<std::size_t>(k0 - lo);
            pow_t_.resize(n);
            for (std::size_t i = 0; i < n; ++i) pow_t_[i] = std::pow(std::abs(grid_.at(i)), spec.alpha);
            b_.resize(ext.n_points);
        }
    }

    Axis(const Axis& other)
        : spec_(other.spec_),
          sampler_(other.sampler_),
          grid_(other.grid_),
          fbm_(other.fbm_ ? std::make_unique<FbmSampler>(other.fbm_->clone()) : nullptr),
          offset_(other.offset_),
          drift_(other.drift_),
          lag_pow_(other.lag_pow_),
          pow_t_(other.pow_t_),
          b_(other.b_.size()),
          v0_(other.v0_.size()),
          w_(other.w_.size()) {}

    [[nodiscard]] bool degenerate() const noexcept { return spec_.alpha == 0.0; }
    [[nodiscard]] bool sup() const noexcept { return spec_.sup; }
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_.n_points; }

    void draw(StreamRng& rng, StreamRng& index_rng) {
        if (degenerate()) return;
        fbm_->sample(rng, b_);
        if (sampler_ == Sampler::tilted) {
            const auto n = static_cast<double>(size());
            index_ = std::min(size() - 1, static_cast<std::size_t>(index_rng.uniform() * n));
        }
    }

    /// Fills W = V0 - h for the given sign of B and returns log of the tilt weight.
    double evaluate(double sign) {
        const std::size_t n = size();
        if (degenerate()) {
            for (std::size_t i = 0; i < n; ++i) w_[i] = -drift_[i];
            return 0.0;
        }
        if (sampler_ == Sampler::plain) {
            for (std::size_t i = 0; i < n; ++i) w_[i] = sign * kSqrt2 * b_[offset_ + i] - pow_t_[i] - drift_[i];
            return 0.0;
        }
        const double bi = b_[index_];
        double vmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lag = i > index_ ? i - index_ : index_ - i;
            v0_[i] = sign * kSqrt2 * (b_[i] - bi) - lag_pow_[lag];
            vmax = std::max(vmax, v0_[i]);
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += std::exp(v0_[i] - vmax);
            w_[i] = v0_[i] - drift_[i];
        }
        return std::log(static_cast<double>(n)) - vmax - std::log(s);
    }

    [[nodiscard]] std::span<const double> w() const noexcept { return w_; }

private:
    AxisSpec spec_;
    Sampler sampler_;
    GridSpec grid_;
    std::unique_ptr<FbmSampler> fbm_;
    std::size_t offset_ = 0;
    std::size_t index_ = 0;
    std::vector<double> drift_, lag_pow_, pow_t_;
    std::vector<double> b_, v0_, w_;
};

// Functional  exp(z_x(W_sojourn + sum_sup sup W)) * tilt weight, evaluated for a set of x.
class Engine {
public:
    Engine(const std::vector<AxisSpec>& axes, double step, Sampler sampler, bool antithetic,
           std::span<const double> xs)
        : antithetic_(antithetic) {
        for (const auto& a : axes) {
            axes_.emplace_back(a, step, sampler);
            if (!a.sup) ++n_sojourn_;
        }
        if (n_sojourn_ < 1 || n_sojourn_ > 2) throw ConfigError("engine: need one or two sojourn axes");
        cell_ = 1.0;
        total_ = 1;
        for (const auto& a : axes_)
            if (!a.sup()) {
                cell_ *= a.grid().step();
                total_ *= a.size();
            }
        counts_.reserve(xs.size());
        for (double x : xs) {
            const std::size_t m = required_count(cell_, x);
            counts_.push_back(m);
            if (m <= total_) max_count_ = std::max(max_count_, m);
        }
        combined_.resize(total_);
    }

    Engine(const Engine&) = default;

    [[nodiscard]] double cell() const noexcept { return cell_; }

    /// Adds one (antithetic-averaged) sample per x to out.
    void sample(std::span<StreamRng> rngs, StreamRng& index_rng, std::span<double> out) {
        for (std::size_t a = 0; a < axes_.size(); ++a) axes_[a].draw(rngs[a], index_rng);
        if (antithetic_) {
            accumulate(1.0, 0.5, out);
            accumulate(-1.0, 0.5, out);
        } else {
            accumulate(1.0, 1.0, out);
        }
    }

private:
    void accumulate(double sign, double scale, std::span<double> out) {
        double log_weight = 0.0;
        double shift = 0.0;
        const Axis* first = nullptr;
        const Axis* second = nullptr;
        for (auto& a : axes_) {
            log_weight += a.evaluate(sign);
            if (a.sup()) {
                shift += supremum(a.w());
            } else if (!first) {
                first = &a;
            } else {
                second = &a;
            }
        }
        if (max_count_ == 0) return;
        const auto w1 = first->w();
        if (second) {
            const auto w2 = second->w();
            std::size_t k = 0;
            for (double a : w1)
                for (double b : w2) combined_[k++] = a + b;
        } else {
            std::copy(w1.begin(), w1.end(), combined_.begin());
        }
        if (max_count_ == 1) {
            top_.assign(1, supremum(combined_));
        } else {
            std::nth_element(combined_.begin(), combined_.begin() + static_cast<std::ptrdiff_t>(max_count_ - 1),
                             combined_.end(), std::greater<>());
            top_.assign(combined_.begin(), combined_.begin() + static_cast<std::ptrdiff_t>(max_count_));
            std::sort(top_.begin(), top_.end(), std::greater<>());
        }
        for (std::size_t k = 0; k < counts_.size(); ++k) {
            const std::size_t m = counts_[k];
            if (m > total_) continue;
            out[k] += scale * std::exp(top_[m - 1] + shift + log_weight);
        }
    }

    std::vector<Axis> axes_;
    bool antithetic_;
    int n_sojourn_ = 0;
    double cell_ = 1.0;
    std::size_t total_ = 0;
    std::vector<std::size_t> counts_;
    std::size_t max_count_ = 0;
    std::vector<double> combined_, top_;
};

constexpr std::uint64_t kIndexStream = 64;
constexpr std::uint64_t kRefineStream = 999;

BatchTable run_engine(const Engine& prototype, std::size_t n_axes, std::size_t n_x, const McSettings& s) {
    const ChunkPlan plan = ChunkPlan::make(s.n_samples, s.chunk_size);
    struct Worker {
        Engine engine;
        std::vector<double> acc;
    };
    auto results = run_chunks(
        0, plan.chunks(), s.workers, [&] { return Worker{prototype, std::vector<double>(n_x)}; },
        [&](Worker& w, std::size_t c) {
            std::vector<StreamRng> rngs;
            rngs.reserve(n_axes);
            for (std::size_t a = 0; a < n_axes; ++a) rngs.emplace_back(StreamId{s.seed, sub_purpose(s.purpose, a), c});
            StreamRng index_rng(StreamId{s.seed, sub_purpose(s.purpose, kIndexStream), c});
            std::fill(w.acc.begin(), w.acc.end(), 0.0);
            for (std::size_t i = 0; i < plan.count(c); ++i) w.engine.sample(rngs, index_rng, w.acc);
            return w.acc;
        });
    BatchTable table(plan.chunks(), n_x);
    for (std::size_t c = 0; c < plan.chunks(); ++c) {
        table.add_count(c, plan.count(c));
        for (std::size_t k = 0; k < n_x; ++k) table.add(c, k, results[c][k]);
    }
    return table;
}

void require_x(std::span<const double> xs) {
    if (xs.empty()) throw ConfigError("at least one x is required");
    for (double x : xs)
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("x must be finite and >= 0");
}

void require_alpha(double alpha, bool allow_zero) {
    const bool ok = (alpha > 0.0 && alpha <= 2.0) || (allow_zero && alpha == 0.0);
    if (!ok) throw ConfigError(allow_zero ? "alpha must lie in [0, 2]" : "alpha must lie in (0, 2]");
}

constexpr std::size_t kMinBatches = 30;

CurveEstimate make_curve(std::span<const double> xs, BatchTable table, const McSettings& s, double measure,
                         const DomainDescriptor& domain, double normalization, double step) {
    CurveEstimate out;
    out.xs.assign(xs.begin(), xs.end());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        ConstantEstimate e;
        e.n_samples = table.total_count();
        e.grid_step = step;
        e.domain = domain;
        e.normalization = normalization;
        e.seed = s.seed;
        if (xs[k] >= measure) {
            e.flags.emplace_back("vanishing-by-bound");
        } else {
            e.value = table.mean(k) / normalization;
            e.std_err = table.std_err(k) / normalization;
        }
        if (table.batches() < kMinBatches) e.flags.emplace_back("few-batches");
        out.points.push_back(std::move(e));
    }
    out.batches = std::move(table);
    return out;
}

CurveEstimate run_curve(const std::vector<AxisSpec>& axes, std::span<const double> xs, const McSettings& s,
                        double measure, const DomainDescriptor& domain, double normalization) {
    s.validate();
    require_x(xs);
    Engine prototype(axes, s.grid_step, s.sampler, s.antithetic, xs);
    const Interval& first = axes.front().interval;
    const double step = GridSpec::with_step(first.lo, first.hi, s.grid_step).step();
    auto curve = make_curve(xs, run_engine(prototype, axes.size(), xs.size(), s), s, measure, domain,
                            normalization, step);
    // x at or beyond the continuous-time domain measure: the sojourn can never exceed it.
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (curve.points[k].has_flag("vanishing-by-bound")) {
            for (std::size_t b = 0; b < curve.batches.batches(); ++b)
                curve.batches.add(b, k, -curve.batches.batch_sum(b, k));
        }
    }
    if (s.refine_check) {
        McSettings fine = s;
        fine.grid_step = s.grid_step / 2.0;
        fine.purpose = sub_purpose(s.purpose, kRefineStream);
        fine.refine_check = false;
        Engine fine_engine(axes, fine.grid_step, fine.sampler, fine.antithetic, xs);
        const BatchTable ft = run_engine(fine_engine, axes.size(), xs.size(), fine);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            auto& p = curve.points[k];
            if (p.has_flag("vanishing-by-bound")) continue;
            const double diff = std::abs(ft.mean(k) / normalization - p.value);
            const double se = std::hypot(ft.std_err(k) / normalization, p.std_err);
            if (diff > 2.0 * se) p.flags.emplace_back("grid-refinement-shift");
        }
    }
    return curve;
}

double rectangle_measure(const Rectangle& r) { return r.area(); }

// Combines per-S curves into limits with the OLS weights of the chosen fit.
LimitCurve combine_limits(std::span<const double> xs, std::span<const double> schedule,
                          const std::vector<CurveEstimate>& curves, const std::vector<double>& scales,
                          bool slope_in_s) {
    const std::size_t ns = schedule.size();
    LimitCurve out;
    out.xs.assign(xs.begin(), xs.end());
    std::vector<double> abscissa(ns);
    for (std::size_t i = 0; i < ns; ++i) abscissa[i] = slope_in_s ? schedule[i] : 1.0 / schedule[i];

    std::vector<std::vector<double>> g(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        LimitEstimate est;
        est.schedule.assign(schedule.begin(), schedule.end());
        std::vector<double> y(ns), se(ns);
        for (std::size_t i = 0; i < ns; ++i) {
            est.per_s.push_back(curves[i].points[k]);
            y[i] = curves[i].points[k].value;
            se[i] = curves[i].points[k].std_err;
        }
        std::vector<double> weights(ns, 0.0);
        ConstantEstimate lim = curves.back().points[k];
        lim.flags.clear();
        if (ns >= 2) {
            const LineFit fit = fit_line(abscissa, y, se);
            if (slope_in_s) {
                lim.value = fit.slope;
                lim.std_err = fit.slope_se;
                est.intercept = fit.intercept;
                est.intercept_se = fit.intercept_se;
                weights = fit.slope_weights;
            } else {
                lim.value = fit.intercept;
                lim.std_err = fit.intercept_se;
                est.intercept = fit.slope;
                est.intercept_se = fit.slope_se;
                weights = fit.intercept_weights;
            }
            if (ns >= 3 && fit.max_standardised_residual > 3.0) lim.flags.emplace_back("S-too-small");
        } else {
            if (slope_in_s) {
                lim.value = y[0] / schedule[0];
                lim.std_err = se[0] / schedule[0];
                weights[0] = 1.0 / schedule[0];
            } else {
                weights[0] = 1.0;
            }
        }
        for (const auto& c : curves)
            for (const auto& f : c.points[k].flags)
                if (std::find(lim.flags.begin(), lim.flags.end(), f) == lim.flags.end()) lim.flags.push_back(f);
        est.limit = lim;
        out.estimates.push_back(std::move(est));

        const std::size_t nb = curves.front().batches.batches();
        g[k].assign(nb, 0.0);
        for (std::size_t i = 0; i < ns; ++i) {
            const auto& t = curves[i].batches;
            if (t.batches() != nb) throw NumericError("limit fit: batch counts differ across S");
            const double f = weights[i] * scales[i] / static_cast<double>(t.total_count());
            for (std::size_t b = 0; b < nb; ++b) g[k][b] += f * t.batch_sum(b, k);
        }
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto [r, rse] = batch_ratio(g[k], g[0]);
        out.ratio.push_back(r);
        out.ratio_se.push_back(rse);
    }
    return out;
}

void require_schedule(std::span<const double> schedule, std::size_t min_points) {
    if (schedule.size() < min_points)
        throw ConfigError("S schedule needs at least " + std::to_string(min_points) + " entries");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0) || !std::isfinite(schedule[i])) throw ConfigError("S schedule must be positive");
        if (i > 0 && !(schedule[i] > schedule[i - 1])) throw ConfigError("S schedule must be increasing");
    }
}

ConstantEstimate product_estimate(std::vector<const ConstantEstimate*> factors) {
    ConstantEstimate out = *factors.back();
    out.value = 1.0;
    double rel2 = 0.0;
    for (const auto* f : factors) {
        out.value *= f->value;
        if (f->value != 0.0) rel2 += (f->std_err / f->value) * (f->std_err / f->value);
    }
    out.std_err = std::abs(out.value) * std::sqrt(rel2);
    return out;
}

}  // namespace

// --- one-dimensional ---------------------------------------------------------------

CurveEstimate berman_1d_curve(double alpha, const DriftSpec& drift, std::span<const double> xs,
                              const Interval& interval, const McSettings& settings) {
    require_alpha(alpha, false);
    drift.validate();
    if (!(interval.hi > interval.lo) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi))
        throw ConfigError("interval: need finite lo < hi");
    return run_curve({AxisSpec{alpha, drift, interval, false}}, xs, settings, interval.length(), interval, 1.0);
}

ConstantEstimate estimate_berman_1d(double alpha, const DriftSpec& drift, double x, const Interval& interval,
                                    const McSettings& settings) {
    const double xs[] = {x};
    return berman_1d_curve(alpha, drift, xs, interval, settings).points.front();
}

LimitCurve berman_1d_limit_curve(double alpha, std::span<const double> xs, std::span<const double> schedule,
                                 const McSettings& settings) {
    require_schedule(schedule, 3);
    std::vector<CurveEstimate> curves;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        McSettings s = settings;
        s.purpose = sub_purpose(settings.purpose, 1000 + i);
        curves.push_back(berman_1d_curve(alpha, {}, xs, Interval{0.0, schedule[i]}, s));
    }
    return combine_limits(xs, schedule, curves, std::vector<double>(schedule.size(), 1.0), true);
}

LimitEstimate estimate_berman_1d_limit(double alpha, double x, std::span<const double> schedule,
                                       const McSettings& settings) {
    const double xs[] = {x};
    return berman_1d_limit_curve(alpha, xs, schedule, settings).estimates.front();
}

LimitEstimate estimate_pickands(double alpha, std::span<const double> schedule, const McSettings& settings) {
    return estimate_berman_1d_limit(alpha, 0.0, schedule, settings);
}

// --- two-dimensional ---------------------------------------------------------------

namespace {

void check_2d(double alpha1, double alpha2, const DriftSpec& d1, const DriftSpec& d2, const DomainRule& rule) {
    require_alpha(alpha1, true);
    require_alpha(alpha2, true);
    d1.validate();
    d2.validate();
    rule.validate();
    const double alphas[] = {alpha1, alpha2};
    const DriftSpec* drifts[] = {&d1, &d2};
    for (int i = 0; i < 2; ++i) {
        if (alphas[i] == 0.0 && (drifts[i]->is_zero() || !rule.two_sided[i]))
            throw ConfigError("an alpha = 0 axis needs a nonzero drift and a two-sided domain");
    }
}

std::vector<AxisSpec> axes_2d(double alpha1, double alpha2, const DriftSpec& d1, const DriftSpec& d2,
                              const DomainRule& rule) {
    const Rectangle r = rule.rectangle();
    return {AxisSpec{alpha1, d1, r.axis1, false}, AxisSpec{alpha2, d2, r.axis2, false}};
}

}  // namespace

CurveEstimate berman_2d_curve(double alpha1, double alpha2, const DriftSpec& drift1, const DriftSpec& drift2,
                              std::span<const double> xs, const DomainRule& rule, const McSettings& settings) {
    check_2d(alpha1, alpha2, drift1, drift2, rule);
    const Rectangle r = rule.rectangle();
    return run_curve(axes_2d(alpha1, alpha2, drift1, drift2, rule), xs, settings, rectangle_measure(r), r,
                     rule.normalization());
}

ConstantEstimate estimate_berman_2d(double alpha1, double alpha2, const DriftSpec& drift1, const DriftSpec& drift2,
                                    double x, const DomainRule& rule, const McSettings& settings) {
    const double xs[] = {x};
    return berman_2d_curve(alpha1, alpha2, drift1, drift2, xs, rule, settings).points.front();
}

LimitCurve berman_2d_limit_curve(double alpha1, double alpha2, const DriftSpec& drift1, const DriftSpec& drift2,
                                 std::span<const double> xs, const DomainRule& rule, std::span<const double> schedule,
                                 const McSettings& settings) {
    require_schedule(schedule, 1);
    std::vector<CurveEstimate> curves;
    std::vector<double> scales;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        McSettings s = settings;
        s.purpose = sub_purpose(settings.purpose, 2000 + i);
        const DomainRule ri = rule.with_size(schedule[i]);
        curves.push_back(berman_2d_curve(alpha1, alpha2, drift1, drift2, xs, ri, s));
        scales.push_back(1.0 / ri.normalization());
    }
    if (rule.normalization_exponent() == 0) {
        // Bounded limit: the largest domain is the estimate.
        const std::vector<CurveEstimate> last{curves.back()};
        const double s_last[] = {schedule.back()};
        auto out = combine_limits(xs, s_last, last, {scales.back()}, false);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            out.estimates[k].schedule.assign(schedule.begin(), schedule.end());
            out.estimates[k].per_s.clear();
            for (const auto& c : curves) out.estimates[k].per_s.push_back(c.points[k]);
        }
        return out;
    }
    return combine_limits(xs, schedule, curves, scales, false);
}

// --- mixed sup/sojourn -------------------------------------------------------------

BhatEstimate estimate_bhat(std::span<const double> alphas, double x, double n1,
                           std::span<const double> n_rest_schedule, const McSettings& settings) {
    if (alphas.empty()) throw ConfigError("bhat: at least one alpha is required");
    for (double a : alphas) require_alpha(a, false);
    if (!(x >= 0.0)) throw ConfigError("bhat: x must be >= 0");
    if (!(n1 > 0.0)) throw ConfigError("bhat: n1 must be positive");
    if (!(x < n1)) throw ConfigError("bhat: x must be smaller than n1");

    BhatEstimate out;
    out.berman_first_axis = estimate_berman_1d(alphas[0], {}, x, Interval{0.0, n1}, settings);
    if (alphas.size() == 1) {
        out.direct = out.berman_first_axis;
        out.product = out.berman_first_axis;
        out.direct_per_n.push_back(out.direct);
        return out;
    }
    require_schedule(n_rest_schedule, 3);

    std::vector<const ConstantEstimate*> factors{&out.berman_first_axis};
    out.pickands.reserve(alphas.size() - 1);
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        McSettings s = settings;
        s.purpose = sub_purpose(settings.purpose, 3000 + i);
        out.pickands.push_back(estimate_pickands(alphas[i], n_rest_schedule, s).limit);
    }
    for (const auto& p : out.pickands) factors.push_back(&p);
    out.product = product_estimate(factors);

    const double xs[] = {x};
    const auto m_rest = static_cast<double>(alphas.size() - 1);
    std::vector<CurveEstimate> curves;
    std::vector<double> scales;
    for (std::size_t j = 0; j < n_rest_schedule.size(); ++j) {
        const double n = n_rest_schedule[j];
        std::vector<AxisSpec> axes{AxisSpec{alphas[0], {}, Interval{0.0, n1}, false}};
        for (std::size_t i = 1; i < alphas.size(); ++i) axes.push_back(AxisSpec{alphas[i], {}, Interval{0.0, n}, true});
        McSettings s = settings;
        s.purpose = sub_purpose(settings.purpose, 4000 + j);
        const double norm = std::pow(n, m_rest);
        curves.push_back(run_curve(axes, xs, s, n1, Interval{0.0, n1}, norm));
        scales.push_back(1.0 / norm);
        out.direct_per_n.push_back(curves.back().points.front());
    }
    if (n_rest_schedule.size() == 1) {
        out.direct = out.direct_per_n.front();
    } else {
        out.direct = combine_limits(xs, n_rest_schedule, curves, scales, false).estimates.front().limit;
    }
    return out;
}

}  // namespace sojourn
