#include "sojourn/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "sojourn/errors.hpp"
#include "sojourn/parallel.hpp"
#include "sojourn/queue.hpp"
#include "sojourn/sojourn.hpp"
#include "sojourn/stats.hpp"

namespace sojourn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

bool valid_alpha(double a) { return a > 0.0 && a <= 2.0; }
bool positive(double v) { return v > 0.0 && std::isfinite(v); }

// a^{-1/alpha} u^{-2/alpha}
double local_scale(double a, double alpha, double u) { return std::pow(a, -1.0 / alpha) * std::pow(u, -2.0 / alpha); }

// a^{-1/alpha*} u^{-2/min(alpha, beta)} with alpha* = infinity when alpha > beta.
double onepoint_scale(double a, double alpha, double beta, double u) {
    const double a_part = alpha > beta ? 1.0 : std::pow(a, -1.0 / alpha);
    return a_part * std::pow(u, -2.0 / std::min(alpha, beta));
}

constexpr std::uint64_t kExperimentPurpose = 0x45585045ULL;  // never shared with constant estimation
constexpr std::uint64_t kTargetPurpose = 0x54415247ULL;
constexpr std::uint64_t kDoubleSumPurpose = 0x44535553ULL;

}  // namespace

void validate(const ScalingFamily& f) {
    std::visit(overloaded{
                   [](const family::Stationary1D& p) {
                       require(positive(p.a), "stationary1d: a must be positive");
                       require(valid_alpha(p.alpha), "stationary1d: alpha must lie in (0, 2]");
                   },
                   [](const family::Stationary2D& p) {
                       require(positive(p.a1) && positive(p.a2), "stationary2d: a1, a2 must be positive");
                       require(valid_alpha(p.alpha1) && valid_alpha(p.alpha2),
                               "stationary2d: alpha1, alpha2 must lie in (0, 2]");
                   },
                   [](const family::OnePoint2D& p) {
                       require(positive(p.a1) && positive(p.a2), "onepoint2d: a1, a2 must be positive");
                       require(valid_alpha(p.alpha1) && valid_alpha(p.alpha2),
                               "onepoint2d: alpha1, alpha2 must lie in (0, 2]");
                       require(positive(p.b1) && positive(p.b2), "onepoint2d: b1, b2 must be positive");
                       require(positive(p.beta1) && positive(p.beta2), "onepoint2d: beta1, beta2 must be positive");
                   },
                   [](const family::Chi& p) {
                       require(positive(p.a), "chi: a must be positive");
                       require(valid_alpha(p.alpha), "chi: alpha must lie in (0, 2]");
                       require(p.m >= 1, "chi: m must be >= 1");
                   },
                   [](const family::Queue& p) {
                       require(p.alpha > 0.0 && p.alpha < 2.0, "queue: alpha must lie in (0, 2)");
                       require(positive(p.c), "queue: c must be positive");
                   },
               },
               f);
}

std::string family_name(const ScalingFamily& f) {
    return std::visit(overloaded{
                          [](const family::Stationary1D&) { return std::string("stationary1d"); },
                          [](const family::Stationary2D&) { return std::string("stationary2d"); },
                          [](const family::OnePoint2D&) { return std::string("onepoint2d"); },
                          [](const family::Chi&) { return std::string("chi"); },
                          [](const family::Queue&) { return std::string("queue"); },
                      },
                      f);
}

std::vector<double> local_scales(const ScalingFamily& f, double u) {
    validate(f);
    require(positive(u), "u must be positive");
    return std::visit(overloaded{
                          [&](const family::Stationary1D& p) {
                              return std::vector<double>{local_scale(p.a, p.alpha, u)};
                          },
                          [&](const family::Stationary2D& p) {
                              return std::vector<double>{local_scale(p.a1, p.alpha1, u),
                                                         local_scale(p.a2, p.alpha2, u)};
                          },
                          [&](const family::OnePoint2D& p) {
                              return std::vector<double>{onepoint_scale(p.a1, p.alpha1, p.beta1, u),
                                                         onepoint_scale(p.a2, p.alpha2, p.beta2, u)};
                          },
                          [&](const family::Chi& p) { return std::vector<double>{local_scale(p.a, p.alpha, u)}; },
                          [&](const family::Queue& p) {
                              return std::vector<double>{queue_scaling(p.alpha, p.c, u)};
                          },
                      },
                      f);
}

double scaling_function(const ScalingFamily& f, double u) {
    double v = 1.0;
    for (double l : local_scales(f, u)) v *= l;
    return v;
}

OnePointTarget onepoint_target(const family::OnePoint2D& f, double S) {
    validate(ScalingFamily{f});
    const double a[] = {f.a1, f.a2}, alpha[] = {f.alpha1, f.alpha2}, b[] = {f.b1, f.b2}, beta[] = {f.beta1, f.beta2};
    OnePointTarget t;
    for (int i = 0; i < 2; ++i) {
        double a_bar = 0.0;
        if (alpha[i] == beta[i])
            a_bar = 1.0 / a[i];
        else if (alpha[i] > beta[i])
            a_bar = 1.0;
        t.alpha_hat[i] = alpha[i] <= beta[i] ? alpha[i] : 0.0;
        t.drift[i] = a_bar == 0.0 ? DriftSpec{} : DriftSpec{a_bar * b[i], beta[i]};
        t.degenerate[i] = alpha[i] > beta[i];
    }
    t.rule = DomainRule::from_exponents(S, f.alpha1, f.beta1, f.alpha2, f.beta2);
    return t;
}

void ExperimentSettings::validate() const {
    require(positive(T1) && positive(T2), "experiment: T1 and T2 must be positive");
    require(positive(queue_horizon_mult), "experiment: queue_horizon_mult must be positive");
    require(positive(delta), "experiment: delta must be positive");
    require(n_target_conditioned >= 1, "experiment: n_target_conditioned must be positive");
    require(max_paths >= 1 && chunk_size >= 1, "experiment: max_paths and chunk_size must be positive");
    require(target_samples >= 100, "experiment: target_samples must be at least 100");
    require(!target_schedule.empty(), "experiment: target_schedule must not be empty");
}

namespace {

std::vector<double> with_zero(std::span<const double> xs) {
    std::vector<double> out;
    if (xs.empty() || xs.front() != 0.0) out.push_back(0.0);
    out.insert(out.end(), xs.begin(), xs.end());
    return out;
}

void check_x_grid(std::span<const double> xs) {
    require(!xs.empty(), "x_grid must not be empty");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require(xs[i] >= 0.0 && std::isfinite(xs[i]), "x_grid values must be finite and >= 0");
        require(i == 0 || xs[i] >= xs[i - 1], "x_grid must be nondecreasing");
    }
}

TargetCurve from_limit(const LimitCurve& lc, std::size_t offset) {
    TargetCurve t;
    t.xs.assign(lc.xs.begin() + static_cast<std::ptrdiff_t>(offset), lc.xs.end());
    t.ratio.assign(lc.ratio.begin() + static_cast<std::ptrdiff_t>(offset), lc.ratio.end());
    t.ratio_se.assign(lc.ratio_se.begin() + static_cast<std::ptrdiff_t>(offset), lc.ratio_se.end());
    for (const auto& e : lc.estimates)
        for (const auto& f : e.limit.flags)
            if (std::find(t.flags.begin(), t.flags.end(), f) == t.flags.end()) t.flags.push_back(f);
    return t;
}

}  // namespace

TargetCurve target_curve(const ScalingFamily& f, const ExperimentSettings& s, std::span<const double> x_grid) {
    validate(f);
    s.validate();
    check_x_grid(x_grid);
    const auto xs = with_zero(x_grid);
    const std::size_t offset = xs.size() - x_grid.size();
    McSettings ms;
    ms.grid_step = s.delta;
    ms.n_samples = s.target_samples;
    ms.seed = s.seed;
    ms.purpose = kTargetPurpose;
    ms.workers = s.workers;
    ms.sampler = s.target_sampler;
    const auto& schedule = s.target_schedule;

    return std::visit(
        overloaded{
            [&](const family::Stationary1D& p) {
                return from_limit(berman_1d_limit_curve(p.alpha, xs, schedule, ms), offset);
            },
            [&](const family::Chi& p) {
                return from_limit(berman_1d_limit_curve(p.alpha, xs, schedule, ms), offset);
            },
            [&](const family::Stationary2D& p) {
                const DomainRule rule{1.0, {false, false}};
                return from_limit(berman_2d_limit_curve(p.alpha1, p.alpha2, {}, {}, xs, rule, schedule, ms), offset);
            },
            [&](const family::OnePoint2D& p) {
                const auto t = onepoint_target(p);
                auto out = from_limit(berman_2d_limit_curve(t.alpha_hat[0], t.alpha_hat[1], t.drift[0], t.drift[1],
                                                            xs, t.rule, schedule, ms),
                                      offset);
                if (t.degenerate[0] || t.degenerate[1]) out.flags.emplace_back("degenerate-axis");
                return out;
            },
            [&](const family::Queue& p) {
                if (s.queue_case == QueueCase::growing)
                    return from_limit(berman_1d_limit_curve(p.alpha, xs, schedule, ms), offset);
                const auto curve = berman_1d_curve(p.alpha, {}, xs, Interval{0.0, s.T1}, ms);
                TargetCurve t;
                for (std::size_t k = offset; k < xs.size(); ++k) {
                    const auto [r, se] = curve.ratio_to_first(k);
                    t.xs.push_back(xs[k]);
                    t.ratio.push_back(r);
                    t.ratio_se.push_back(se);
                }
                return t;
            },
        },
        f);
}

namespace {

// Type-erased sampler of one replicate on the experiment's grid or lattice.
struct ReplicateSampler {
    std::unique_ptr<PathSampler> path;
    std::unique_ptr<FieldSampler> field;
    std::size_t size = 0;

    [[nodiscard]] ReplicateSampler clone() const {
        ReplicateSampler c;
        if (path) c.path = std::make_unique<PathSampler>(path->clone());
        if (field) c.field = std::make_unique<FieldSampler>(field->clone());
        c.size = size;
        return c;
    }
    void sample(StreamRng& rng, std::span<double> out) {
        if (path)
            path->sample(rng, out);
        else
            field->sample(rng, out);
    }
};

// Grids with step exactly `step` so that the lattice matches the target's lattice of
// step delta in local units; the domain end is rounded down to a whole number of steps.
std::size_t whole_steps(double T, double step) {
    return static_cast<std::size_t>(std::max(1.0, std::floor(T / step * (1.0 + 1e-12))));
}

GridSpec exact_grid(double T, double step) {
    const std::size_t k = whole_steps(T, step);
    return GridSpec{0.0, static_cast<double>(k) * step, k + 1};
}

GridSpec symmetric_grid(double T, double step) {
    const std::size_t k = whole_steps(T, step);
    return GridSpec{-static_cast<double>(k) * step, static_cast<double>(k) * step, 2 * k + 1};
}

struct ExperimentGeometry {
    ReplicateSampler sampler;
    std::vector<GridSpec> grids;
    double cell = 1.0;
    double measure = 1.0;  // |E|
    double lattice_cell = 1.0;  // cell / v(u) = delta^dims
};

ExperimentGeometry make_geometry(const ScalingFamily& f, const ExperimentSettings& s, double u) {
    const auto scales = local_scales(f, u);
    ExperimentGeometry g;
    std::visit(overloaded{
                   [&](const family::Stationary1D& p) {
                       const auto grid = exact_grid(s.T1, s.delta * scales[0]);
                       g.sampler.path = std::make_unique<PathSampler>(process::StationaryExp1D{p.a, p.alpha}, grid);
                       g.grids = {grid};
                   },
                   [&](const family::Chi& p) {
                       const auto grid = exact_grid(s.T1, s.delta * scales[0]);
                       g.sampler.path = std::make_unique<PathSampler>(
                           process::Chi{p.m, process::StationaryExp1D{p.a, p.alpha}}, grid);
                       g.grids = {grid};
                   },
                   [&](const family::Queue& p) {
                       const double T_u = s.T1 * scales[0];
                       const auto grid = exact_grid(T_u, s.delta * scales[0]);
                       g.sampler.path = std::make_unique<PathSampler>(
                           process::Queue{p.alpha, p.c, s.queue_horizon_mult, u}, grid);
                       g.grids = {grid};
                   },
                   [&](const family::Stationary2D& p) {
                       const Lattice2D lat{exact_grid(s.T1, s.delta * scales[0]),
                                           exact_grid(s.T2, s.delta * scales[1])};
                       g.sampler.field = std::make_unique<FieldSampler>(
                           process::StationaryExp2D{p.a1, p.a2, p.alpha1, p.alpha2}, lat);
                       g.grids = {lat.axis1, lat.axis2};
                   },
                   [&](const family::OnePoint2D& p) {
                       const Lattice2D lat{symmetric_grid(s.T1, s.delta * scales[0]),
                                           symmetric_grid(s.T2, s.delta * scales[1])};
                       process::ScaledVariance2D spec;
                       spec.base = {p.a1, p.a2, p.alpha1, p.alpha2};
                       spec.b1 = p.b1;
                       spec.b2 = p.b2;
                       spec.beta1 = p.beta1;
                       spec.beta2 = p.beta2;
                       g.sampler.field = std::make_unique<FieldSampler>(spec, lat);
                       g.grids = {lat.axis1, lat.axis2};
                   },
               },
               f);
    g.sampler.size = 1;
    g.cell = 1.0;
    g.measure = 1.0;
    for (const auto& gr : g.grids) {
        g.sampler.size *= gr.n_points;
        g.cell *= gr.step();
        g.measure *= gr.length();
        g.lattice_cell *= s.delta;
    }
    return g;
}

struct ChunkCounts {
    std::size_t paths = 0;
    std::size_t conditioned = 0;
    std::vector<std::size_t> hits;
};

}  // namespace

ExperimentResult conditional_sojourn_cdf(const ScalingFamily& f, const ExperimentSettings& s, double u,
                                         std::span<const double> x_grid, const TargetCurve& target) {
    const auto started = std::chrono::steady_clock::now();
    validate(f);
    s.validate();
    check_x_grid(x_grid);
    require(positive(u), "u must be positive");

    ExperimentResult r;
    r.family = family_name(f);
    r.u = u;
    r.v_u = scaling_function(f, u);
    r.seed = s.seed;
    r.purpose = sub_purpose(kExperimentPurpose, std::bit_cast<std::uint64_t>(u));

    // Queue case with a bounded window: x within one grid step of T is excluded.
    std::vector<double> xs;
    const bool bounded_queue = std::holds_alternative<family::Queue>(f) && s.queue_case == QueueCase::bounded;
    for (double x : x_grid) {
        if (bounded_queue && x >= s.T1 - s.delta)
            r.excluded_x.push_back(x);
        else
            xs.push_back(x);
    }
    if (!r.excluded_x.empty())
        r.notes.emplace_back("x within one grid step of T excluded: the limit at x = T generally does not exist");
    if (std::holds_alternative<family::Queue>(f) && s.queue_case == QueueCase::growing)
        r.notes.emplace_back("growing window uses T_u = v(u) * T1 in place of the asymptotic growth condition");
    if (const auto* op = std::get_if<family::OnePoint2D>(&f)) {
        if (op->alpha1 > op->beta1 || op->alpha2 > op->beta2) r.flags.emplace_back("degenerate-axis");
    }
    r.x_grid = xs;

    auto geom = make_geometry(f, s, u);
    r.grids = geom.grids;
    std::vector<std::size_t> need(xs.size());
    std::vector<bool> vanishing(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        // Vol > v(u) x  <=>  count * delta^dims > x, since the cell is exactly delta^dims v(u).
        need[k] = required_count(geom.lattice_cell, xs[k]);
        vanishing[k] = need[k] > geom.sampler.size;
    }

    const std::size_t n_chunks_max = (s.max_paths + s.chunk_size - 1) / s.chunk_size;
    const unsigned workers = resolve_workers(s.workers);
    const std::size_t wave = std::max<std::size_t>(1, 2 * static_cast<std::size_t>(workers));
    auto run = [&](ReplicateSampler& smp, std::size_t chunk) {
        StreamRng rng(StreamId{s.seed, r.purpose, chunk});
        ChunkCounts cc;
        cc.hits.assign(xs.size(), 0);
        std::vector<double> values(smp.size);
        const std::size_t first = chunk * s.chunk_size;
        cc.paths = std::min(s.chunk_size, s.max_paths - first);
        for (std::size_t i = 0; i < cc.paths; ++i) {
            smp.sample(rng, values);
            const auto above =
                static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [u](double v) { return v > u; }));
            if (above == 0) continue;
            ++cc.conditioned;
            for (std::size_t k = 0; k < xs.size(); ++k)
                if (!vanishing[k] && above >= need[k]) ++cc.hits[k];
        }
        return cc;
    };

    std::vector<std::size_t> hits(xs.size(), 0);
    std::size_t next = 0;
    bool done = false;
    while (!done && next < n_chunks_max) {
        const std::size_t last = std::min(n_chunks_max, next + wave);
        const auto results = run_chunks(
            next, last, workers, [&] { return geom.sampler.clone(); }, run);
        for (const auto& cc : results) {
            r.n_paths += cc.paths;
            r.n_conditioned += cc.conditioned;
            for (std::size_t k = 0; k < xs.size(); ++k) hits[k] += cc.hits[k];
            ++r.chunks_used;
            if (r.n_conditioned >= s.n_target_conditioned) {
                done = true;
                break;
            }
        }
        next = last;
    }

    if (r.n_conditioned < s.min_conditioned) r.flags.emplace_back("low-confidence");
    if (r.n_conditioned == 0) r.flags.emplace_back("no-conditioned-replicates");
    const double p_sup = r.n_paths ? static_cast<double>(r.n_conditioned) / static_cast<double>(r.n_paths) : 0.0;
    if (p_sup < 1e-4 || p_sup > 1e-1) r.flags.emplace_back("level-outside-design-range");

    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double ratio =
            r.n_conditioned ? static_cast<double>(hits[k]) / static_cast<double>(r.n_conditioned) : 0.0;
        const auto ci = wilson_interval(hits[k], std::max<std::size_t>(1, r.n_conditioned));
        r.ratio_hat.push_back(ratio);
        r.ci_lo.push_back(ci.lo);
        r.ci_hi.push_back(ci.hi);
        r.ci_halfwidth.push_back(0.5 * (ci.hi - ci.lo));
        const auto it = std::find(target.xs.begin(), target.xs.end(), xs[k]);
        if (it == target.xs.end()) throw ConfigError("target curve does not cover the x grid");
        const auto idx = static_cast<std::size_t>(it - target.xs.begin());
        r.target.push_back(target.ratio[idx]);
        r.target_se.push_back(target.ratio_se[idx]);
        r.sup_distance = std::max(r.sup_distance, std::abs(ratio - target.ratio[idx]));
    }
    for (const auto& fl : target.flags)
        if (std::find(r.flags.begin(), r.flags.end(), "target-" + fl) == r.flags.end())
            r.flags.push_back("target-" + fl);
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
}

std::vector<ExperimentResult> conditional_sojourn_ladder(const ScalingFamily& f, const ExperimentSettings& s,
                                                         std::span<const double> levels,
                                                         std::span<const double> x_grid) {
    require(!levels.empty(), "at least one level u is required");
    const auto target = target_curve(f, s, x_grid);
    std::vector<ExperimentResult> out;
    for (double u : levels) out.push_back(conditional_sojourn_cdf(f, s, u, x_grid, target));
    return out;
}

bool sup_distance_nonincreasing(std::span<const ExperimentResult> ladder) noexcept {
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i].sup_distance > ladder[i - 1].sup_distance) return false;
    return true;
}

// --- double-sum diagnostic ---------------------------------------------------------

void DoubleSumSettings::validate() const {
    require(positive(u), "double-sum: u must be positive");
    require(positive(T), "double-sum: T must be positive");
    require(positive(delta), "double-sum: delta must be positive");
    require(!n_schedule.empty(), "double-sum: n schedule must not be empty");
    for (double n : n_schedule) require(positive(n), "double-sum: n must be positive");
    require(n_paths >= 2, "double-sum: n_paths must be >= 2");
}

bool DoubleSumResult::ratio_decreasing() const noexcept {
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].ratio < points[i - 1].ratio)) return false;
    return true;
}

namespace {

struct BlockLayout {
    std::array<std::size_t, 2> len{1, 1};     // points per block side
    std::array<std::size_t, 2> count{1, 1};   // blocks per axis
    [[nodiscard]] std::size_t blocks() const noexcept { return count[0] * count[1]; }
};

}  // namespace

DoubleSumResult double_sum_diagnostic(const ScalingFamily& f, const DoubleSumSettings& s) {
    validate(f);
    s.validate();
    const bool is1d = std::holds_alternative<family::Stationary1D>(f);
    const bool is2d = std::holds_alternative<family::Stationary2D>(f);
    if (!is1d && !is2d) throw ConfigError("double-sum: family must be stationary1d or stationary2d");
    const auto scales = local_scales(f, s.u);
    const std::size_t dims = scales.size();

    std::array<GridSpec, 2> grids;
    for (std::size_t d = 0; d < dims; ++d) grids[d] = GridSpec::with_step(0.0, s.T, s.delta * scales[d]);
    std::array<std::size_t, 2> npts{grids[0].n_points, dims == 2 ? grids[1].n_points : 1};

    std::vector<BlockLayout> layouts;
    for (double n : s.n_schedule) {
        BlockLayout b;
        for (std::size_t d = 0; d < dims; ++d) {
            b.len[d] = static_cast<std::size_t>(std::max(1.0, std::round(n / s.delta)));
            if (b.len[d] > npts[d]) throw ConfigError("double-sum: blocks larger than the domain");
            b.count[d] = npts[d] / b.len[d];
        }
        if (b.blocks() < 2) throw ConfigError("double-sum: the partition needs at least two blocks");
        layouts.push_back(b);
    }

    auto spec_for = [&](std::size_t n1, std::size_t n2) -> std::pair<ProcessSpec, Lattice2D> {
        if (const auto* p = std::get_if<family::Stationary1D>(&f)) {
            const GridSpec g{0.0, grids[0].step() * static_cast<double>(n1 - 1), n1};
            return {process::StationaryExp1D{p->a, p->alpha}, Lattice2D{g, g}};
        }
        const auto& p = std::get<family::Stationary2D>(f);
        const GridSpec g1{0.0, grids[0].step() * static_cast<double>(n1 - 1), n1};
        const GridSpec g2{0.0, grids[1].step() * static_cast<double>(n2 - 1), n2};
        return {process::StationaryExp2D{p.a1, p.a2, p.alpha1, p.alpha2}, Lattice2D{g1, g2}};
    };
    auto make_sampler = [&](std::size_t n1, std::size_t n2) {
        ReplicateSampler smp;
        const auto [spec, lat] = spec_for(n1, n2);
        if (dims == 1) {
            if (n1 < 2) throw ConfigError("double-sum: blocks need at least two grid points");
            smp.path = std::make_unique<PathSampler>(spec, lat.axis1);
            smp.size = n1;
        } else {
            smp.field = std::make_unique<FieldSampler>(spec, lat);
            smp.size = n1 * n2;
        }
        return smp;
    };

    DoubleSumResult out;
    out.family = family_name(f);
    out.u = s.u;
    out.independent_blocks = s.independent_blocks;
    const ChunkPlan plan = ChunkPlan::make(s.n_paths, s.chunk_size);
    const std::size_t nl = layouts.size();

    // Per chunk and layout: sum N, sum N(N-1), per-block exceedance counts.
    struct Acc {
        std::vector<double> n, nn;
        std::vector<std::vector<std::size_t>> block_hits;
    };
    auto new_acc = [&] {
        Acc a;
        a.n.assign(nl, 0.0);
        a.nn.assign(nl, 0.0);
        for (const auto& b : layouts) a.block_hits.emplace_back(b.blocks(), 0);
        return a;
    };
    auto tally = [&](Acc& a, std::size_t l, const std::vector<char>& exceeded) {
        std::size_t count = 0;
        for (std::size_t k = 0; k < exceeded.size(); ++k)
            if (exceeded[k]) {
                ++count;
                ++a.block_hits[l][k];
            }
        const auto c = static_cast<double>(count);
        a.n[l] += c;
        a.nn[l] += c * (c - 1.0);
    };

    std::vector<Acc> per_chunk;
    if (!s.independent_blocks) {
        struct Worker {
            ReplicateSampler smp;
            std::vector<double> values;
        };
        per_chunk = run_chunks(
            0, plan.chunks(), s.workers,
            [&] {
                Worker w{make_sampler(npts[0], npts[1]), {}};
                w.values.resize(w.smp.size);
                return w;
            },
            [&](Worker& w, std::size_t chunk) {
                StreamRng rng(StreamId{s.seed, kDoubleSumPurpose, chunk});
                Acc a = new_acc();
                std::vector<char> exceeded;
                for (std::size_t i = 0; i < plan.count(chunk); ++i) {
                    w.smp.sample(rng, w.values);
                    for (std::size_t l = 0; l < nl; ++l) {
                        const auto& b = layouts[l];
                        exceeded.assign(b.blocks(), 0);
                        for (std::size_t i1 = 0; i1 < b.count[0] * b.len[0]; ++i1)
                            for (std::size_t i2 = 0; i2 < b.count[1] * b.len[1]; ++i2)
                                if (w.values[i1 * npts[1] + i2] > s.u)
                                    exceeded[(i1 / b.len[0]) * b.count[1] + i2 / b.len[1]] = 1;
                        tally(a, l, exceeded);
                    }
                }
                return a;
            });
    } else {
        struct Worker {
            std::vector<ReplicateSampler> smp;
            std::vector<double> values;
        };
        per_chunk = run_chunks(
            0, plan.chunks(), s.workers,
            [&] {
                Worker w;
                for (const auto& b : layouts) w.smp.push_back(make_sampler(b.len[0], dims == 2 ? b.len[1] : 1));
                return w;
            },
            [&](Worker& w, std::size_t chunk) {
                Acc a = new_acc();
                std::vector<char> exceeded;
                for (std::size_t l = 0; l < nl; ++l) {
                    StreamRng rng(StreamId{s.seed, sub_purpose(kDoubleSumPurpose, l + 1), chunk});
                    w.values.resize(w.smp[l].size);
                    for (std::size_t i = 0; i < plan.count(chunk); ++i) {
                        exceeded.assign(layouts[l].blocks(), 0);
                        for (std::size_t k = 0; k < layouts[l].blocks(); ++k) {
                            w.smp[l].sample(rng, w.values);
                            exceeded[k] = supremum(w.values) > s.u ? 1 : 0;
                        }
                        tally(a, l, exceeded);
                    }
                }
                return a;
            });
    }

    const auto total = static_cast<double>(s.n_paths);
    for (std::size_t l = 0; l < nl; ++l) {
        DoubleSumPoint p;
        p.n = s.n_schedule[l];
        p.blocks = layouts[l].blocks();
        std::vector<double> a(plan.chunks()), c(plan.chunks());
        std::vector<std::size_t> hits(p.blocks, 0);
        for (std::size_t ch = 0; ch < plan.chunks(); ++ch) {
            a[ch] = per_chunk[ch].nn[l];
            c[ch] = per_chunk[ch].n[l];
            p.single_sum += c[ch];
            p.double_sum += a[ch];
            for (std::size_t k = 0; k < p.blocks; ++k) hits[k] += per_chunk[ch].block_hits[l][k];
        }
        p.single_sum /= total;
        p.double_sum /= total;
        const auto [ratio, se] = batch_ratio(a, c);
        p.ratio = ratio;
        p.ratio_se = se;
        p.max_block_probability = static_cast<double>(*std::max_element(hits.begin(), hits.end())) / total;
        p.independence_bound = static_cast<double>(p.blocks - 1) * p.max_block_probability;
        out.points.push_back(p);
    }
    return out;
}

}  // namespace sojourn
