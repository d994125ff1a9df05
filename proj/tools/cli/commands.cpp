#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sojourn/asymptotics.hpp"
#include "sojourn/berman.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/queue.hpp"

namespace sojourn::cli {

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string Table::to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

namespace {

double number(const json& c, const char* key) { return c.at(key).get<double>(); }
std::size_t count(const json& c, const char* key) { return c.at(key).get<std::size_t>(); }
std::vector<double> numbers(const json& c, const char* key) { return c.at(key).get<std::vector<double>>(); }
std::string text(const json& c, const char* key) { return c.at(key).get<std::string>(); }

std::string join_flags(const std::vector<std::string>& flags) {
    std::string s;
    for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
    return s;
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

McSettings mc_settings(const json& c) {
    McSettings s;
    if (c.contains("grid_step")) s.grid_step = number(c, "grid_step");
    if (c.contains("n_samples")) s.n_samples = count(c, "n_samples");
    s.seed = c.at("seed").get<std::uint64_t>();
    s.chunk_size = count(c, "chunk_size");
    s.workers = c.at("workers").get<unsigned>();
    if (c.contains("sampler")) s.sampler = text(c, "sampler") == "plain" ? Sampler::plain : Sampler::tilted;
    if (c.contains("antithetic")) s.antithetic = c.at("antithetic").get<bool>();
    if (c.contains("refine_check")) s.refine_check = c.at("refine_check").get<bool>();
    s.validate();
    return s;
}

void collect(std::vector<std::string>& into, const std::vector<std::string>& flags, const std::string& prefix = "") {
    for (const auto& f : flags) {
        const std::string tagged = prefix + f;
        if (std::find(into.begin(), into.end(), tagged) == into.end()) into.push_back(tagged);
    }
}

// --- estimate-constant --------------------------------------------------------------

const std::vector<std::string> kEstimateHeader{"row", "x", "S", "value", "std_err", "grid_step", "n_samples", "flags"};

std::vector<std::string> estimate_row(const std::string& row, double x, double S, const ConstantEstimate& e) {
    return {row, fmt(x), fmt(S), fmt(e.value), fmt(e.std_err), fmt(e.grid_step), fmt(e.n_samples), join_flags(e.flags)};
}

void add_limit_rows(CommandOutput& out, const LimitCurve& lc) {
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lc.xs.size(); ++k) {
        const auto& est = lc.estimates[k];
        for (std::size_t i = 0; i < est.per_s.size(); ++i)
            out.table.rows.push_back(estimate_row("per_s", lc.xs[k], est.schedule[i], est.per_s[i]));
        out.table.rows.push_back(estimate_row("limit", lc.xs[k], inf, est.limit));
        collect(out.flags, est.limit.flags);
    }
    json ratios = json::array();
    for (std::size_t k = 0; k < lc.xs.size(); ++k)
        ratios.push_back({{"x", lc.xs[k]}, {"ratio", lc.ratio[k]}, {"ratio_se", lc.ratio_se[k]}});
    out.details["ratio_to_first_x"] = ratios;
}

DomainRule rule_from(const json& c, double S) {
    const double alpha[] = {number(c, "alpha"), number(c, "alpha2")};
    const double b[] = {number(c, "drift_b"), number(c, "drift2_b")};
    const double beta[] = {number(c, "drift_beta"), number(c, "drift2_beta")};
    DomainRule r{S, {false, false}};
    for (int i = 0; i < 2; ++i) r.two_sided[i] = b[i] > 0.0 && (alpha[i] == 0.0 || alpha[i] >= beta[i]);
    r.validate();
    return r;
}

CommandOutput estimate_constant(const json& c) {
    CommandOutput out;
    out.table = {"estimate-constant/v1", kEstimateHeader, {}};
    const auto fam = text(c, "family");
    const McSettings ms = mc_settings(c);
    const double alpha = number(c, "alpha");
    const DriftSpec d1{number(c, "drift_b"), number(c, "drift_beta")};
    const DriftSpec d2{number(c, "drift2_b"), number(c, "drift2_beta")};
    auto xs = numbers(c, "x");
    const auto schedule = numbers(c, "schedule");

    if (fam == "berman1d") {
        const auto iv = numbers(c, "interval");
        if (iv.size() != 2) throw ConfigError("field 'interval': expected two numbers lo,hi");
        const Interval interval{iv[0], iv[1]};
        const auto curve = berman_1d_curve(alpha, d1, xs, interval, ms);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            out.table.rows.push_back(estimate_row("estimate", xs[k], interval.length(), curve.points[k]));
            collect(out.flags, curve.points[k].flags);
        }
        out.details["chunks"] = curve.batches.batches();
    } else if (fam == "berman1d-limit" || fam == "pickands") {
        if (fam == "pickands") xs = {0.0};
        add_limit_rows(out, berman_1d_limit_curve(alpha, xs, schedule, ms));
    } else if (fam == "berman2d") {
        const DomainRule rule = rule_from(c, number(c, "S"));
        const auto curve = berman_2d_curve(alpha, number(c, "alpha2"), d1, d2, xs, rule, ms);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            out.table.rows.push_back(estimate_row("estimate", xs[k], rule.S, curve.points[k]));
            collect(out.flags, curve.points[k].flags);
        }
        out.details["normalization_exponent"] = rule.normalization_exponent();
        out.details["two_sided"] = {rule.two_sided[0], rule.two_sided[1]};
    } else if (fam == "berman2d-limit") {
        const DomainRule rule = rule_from(c, schedule.back());
        add_limit_rows(out, berman_2d_limit_curve(alpha, number(c, "alpha2"), d1, d2, xs, rule, schedule, ms));
        out.details["normalization_exponent"] = rule.normalization_exponent();
        out.details["two_sided"] = {rule.two_sided[0], rule.two_sided[1]};
    } else if (fam == "bhat") {
        const auto alphas = numbers(c, "alphas");
        const double n1 = number(c, "n1");
        const double inf = std::numeric_limits<double>::infinity();
        for (double x : xs) {
            const auto b = estimate_bhat(alphas, x, n1, schedule, ms);
            out.table.rows.push_back(estimate_row("direct", x, inf, b.direct));
            out.table.rows.push_back(estimate_row("product", x, inf, b.product));
            for (std::size_t j = 0; j < b.direct_per_n.size(); ++j)
                out.table.rows.push_back(estimate_row(
                    "direct_per_n", x, alphas.size() > 1 ? schedule[j] : n1, b.direct_per_n[j]));
            out.table.rows.push_back(estimate_row("berman_first_axis", x, n1, b.berman_first_axis));
            for (const auto& p : b.pickands) out.table.rows.push_back(estimate_row("pickands", 0.0, inf, p));
            collect(out.flags, b.direct.flags);
            collect(out.flags, b.product.flags);
        }
    }
    return out;
}

// --- run-experiment -------------------------------------------------------------------

ScalingFamily experiment_family(const json& c) {
    const auto fam = text(c, "family");
    if (fam == "stationary1d") return family::Stationary1D{number(c, "a"), number(c, "alpha")};
    if (fam == "stationary2d")
        return family::Stationary2D{number(c, "a"), number(c, "a2"), number(c, "alpha"), number(c, "alpha2")};
    if (fam == "onepoint2d")
        return family::OnePoint2D{number(c, "a"),  number(c, "a2"),    number(c, "alpha"), number(c, "alpha2"),
                                  number(c, "b1"), number(c, "b2"),    number(c, "beta1"), number(c, "beta2")};
    if (fam == "chi") return family::Chi{number(c, "a"), number(c, "alpha"), c.at("m").get<int>()};
    return family::Queue{number(c, "alpha"), number(c, "c")};
}

CommandOutput run_experiment(const json& c) {
    CommandOutput out;
    out.table = {"run-experiment/v1",
                 {"u", "x", "ratio_hat", "ci_lo", "ci_hi", "target", "target_se", "n_conditioned", "v_u"},
                 {}};
    const auto fam = experiment_family(c);
    ExperimentSettings s;
    s.T1 = number(c, "T1");
    s.T2 = number(c, "T2");
    s.queue_case = text(c, "queue_case") == "growing" ? QueueCase::growing : QueueCase::bounded;
    s.queue_horizon_mult = number(c, "horizon_mult");
    s.delta = number(c, "delta");
    s.n_target_conditioned = count(c, "n_target_conditioned");
    s.min_conditioned = count(c, "min_conditioned");
    s.max_paths = count(c, "max_paths");
    s.chunk_size = count(c, "chunk_size");
    if (s.chunk_size == 0) s.chunk_size = 2000;
    s.seed = c.at("seed").get<std::uint64_t>();
    s.workers = c.at("workers").get<unsigned>();
    s.target_samples = count(c, "target_samples");
    s.target_schedule = numbers(c, "target_schedule");
    s.target_sampler = text(c, "target_sampler") == "plain" ? Sampler::plain : Sampler::tilted;
    const auto levels = numbers(c, "levels");
    const auto x_grid = numbers(c, "x_grid");

    const auto ladder = conditional_sojourn_ladder(fam, s, levels, x_grid);
    json lv = json::array();
    for (const auto& r : ladder) {
        for (std::size_t k = 0; k < r.x_grid.size(); ++k)
            out.table.rows.push_back({fmt(r.u), fmt(r.x_grid[k]), fmt(r.ratio_hat[k]), fmt(r.ci_lo[k]),
                                      fmt(r.ci_hi[k]), fmt(r.target[k]), fmt(r.target_se[k]), fmt(r.n_conditioned),
                                      fmt(r.v_u)});
        json grids = json::array();
        for (const auto& g : r.grids) grids.push_back({{"start", g.start}, {"end", g.end}, {"n_points", g.n_points}});
        lv.push_back({{"u", r.u},
                      {"v_u", r.v_u},
                      {"sup_distance", r.sup_distance},
                      {"n_conditioned", r.n_conditioned},
                      {"n_paths", r.n_paths},
                      {"chunks_used", r.chunks_used},
                      {"stream_purpose", r.purpose},
                      {"excluded_x", r.excluded_x},
                      {"grids", grids},
                      {"flags", r.flags},
                      {"notes", r.notes}});
        char prefix[64];
        std::snprintf(prefix, sizeof prefix, "u=%g:", r.u);
        collect(out.flags, r.flags, prefix);
        collect(out.notes, r.notes);
    }
    out.details["family"] = family_name(fam);
    out.details["levels"] = lv;
    out.details["sup_distance_nonincreasing"] = sup_distance_nonincreasing(ladder);
    return out;
}

// --- double-sum ------------------------------------------------------------------------

CommandOutput double_sum(const json& c) {
    CommandOutput out;
    out.table = {"double-sum/v1",
                 {"n", "blocks", "single_sum", "double_sum", "ratio", "ratio_se", "max_block_probability",
                  "independence_bound"},
                 {}};
    ScalingFamily fam = family::Stationary1D{number(c, "a"), number(c, "alpha")};
    if (text(c, "family") == "stationary2d")
        fam = family::Stationary2D{number(c, "a"), number(c, "a2"), number(c, "alpha"), number(c, "alpha2")};
    DoubleSumSettings s;
    s.u = number(c, "u");
    s.T = number(c, "T");
    s.n_schedule = numbers(c, "n_schedule");
    s.delta = number(c, "delta");
    s.n_paths = count(c, "n_paths");
    s.chunk_size = count(c, "chunk_size");
    s.seed = c.at("seed").get<std::uint64_t>();
    s.workers = c.at("workers").get<unsigned>();
    s.independent_blocks = c.at("independent_blocks").get<bool>();
    const auto r = double_sum_diagnostic(fam, s);
    for (const auto& p : r.points)
        out.table.rows.push_back({fmt(p.n), fmt(p.blocks), fmt(p.single_sum), fmt(p.double_sum), fmt(p.ratio),
                                  fmt(p.ratio_se), fmt(p.max_block_probability), fmt(p.independence_bound)});
    out.details["ratio_decreasing"] = r.ratio_decreasing();
    return out;
}

// --- oracle ----------------------------------------------------------------------------

CommandOutput oracle(const json& c) {
    if (number(c, "alpha") != 2.0) throw ConfigError("no closed-form oracle; use --family brownian-sup checks");
    CommandOutput out;
    out.table = {"oracle/v1", {"x", "S", "value"}, {}};
    const int order = c.at("order").get<int>();
    for (double S : numbers(c, "S"))
        for (double x : numbers(c, "x")) {
            if (!(S > 0.0) || !(x >= 0.0)) throw ConfigError("oracle: need S > 0 and x >= 0");
            out.table.rows.push_back({fmt(x), fmt(S), fmt(berman2_parabola_oracle(x, S, order))});
        }
    return out;
}

// --- convergence -----------------------------------------------------------------------

CommandOutput convergence(const json& c) {
    CommandOutput out;
    const auto mode = text(c, "mode");
    const double alpha = number(c, "alpha");
    const auto xs = numbers(c, "x");
    McSettings ms = mc_settings(c);

    if (mode == "grid") {
        out.table = {"convergence-grid/v1", {"grid_step", "x", "S", "value", "std_err", "n_samples", "flags"}, {}};
        const double S = number(c, "S");
        const auto steps = numbers(c, "grid_steps");
        for (std::size_t i = 0; i < steps.size(); ++i) {
            McSettings si = ms;
            si.grid_step = steps[i];
            si.purpose = sub_purpose(0x47524944ULL, i);
            const auto curve = berman_1d_curve(alpha, {}, xs, Interval{0.0, S}, si);
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const auto& p = curve.points[k];
                out.table.rows.push_back({fmt(p.grid_step), fmt(xs[k]), fmt(S), fmt(p.value), fmt(p.std_err),
                                          fmt(p.n_samples), join_flags(p.flags)});
            }
        }
        return out;
    }
    if (mode == "limit") {
        out.table = {"convergence-limit/v1", kEstimateHeader, {}};
        add_limit_rows(out, berman_1d_limit_curve(alpha, xs, numbers(c, "schedule"), ms));
        return out;
    }

    // queue: short-interval prediction against Monte Carlo over a ladder of levels.
    out.table = {"convergence-queue/v1",
                 {"u", "x", "n", "prediction", "mc", "mc_se", "ratio", "bhat", "bhat_se", "method"},
                 {}};
    const double qc = number(c, "c");
    const double n = number(c, "n");
    const double step = number(c, "step");
    McSettings bs = ms;
    bs.grid_step = step;
    bs.n_samples = count(c, "bhat_samples");
    bs.purpose = 0x42484154ULL;
    const auto curve = berman_1d_curve(alpha, {}, xs, Interval{0.0, n}, bs);
    double h = 1.0;
    double h_rel_se = 0.0;
    if (alpha != 1.0) {
        McSettings hs = bs;
        hs.purpose = 0x48414cULL;
        const auto hp = estimate_pickands(alpha, numbers(c, "schedule"), hs);
        h = hp.limit.value;
        h_rel_se = hp.limit.std_err / hp.limit.value;
        out.notes.emplace_back("H_alpha estimated by the S-schedule slope");
    }
    std::vector<double> ratios;
    const auto levels = numbers(c, "levels");
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double u = levels[li];
        const auto qa = QueueAsymptotics::make(alpha, qc, u);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double bhat = h * curve.points[k].value;
            const double bhat_se = bhat * std::hypot(curve.points[k].std_err / curve.points[k].value, h_rel_se);
            QueueWindowSettings qs;
            qs.alpha = alpha;
            qs.c = qc;
            qs.u = u;
            qs.n = n;
            qs.x = xs[k];
            qs.step = step;
            qs.n_samples = ms.n_samples;
            qs.seed = ms.seed;
            qs.purpose = sub_purpose(0x51554555ULL, li * xs.size() + k);
            qs.chunk_size = ms.chunk_size;
            qs.workers = ms.workers;
            const auto mc = queue_window_probability(qs);
            const double pred = queue_prefactor(qa, n, xs[k], bhat);
            const double ratio = mc.probability > 0.0 ? pred / mc.probability : std::numeric_limits<double>::infinity();
            if (k == 0) ratios.push_back(ratio);
            out.table.rows.push_back({fmt(u), fmt(xs[k]), fmt(n), fmt(pred), fmt(mc.probability), fmt(mc.std_err),
                                      fmt(ratio), fmt(bhat), fmt(bhat_se), mc.method});
        }
    }
    bool toward_one = true;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        if (!(std::abs(ratios[i] - 1.0) < std::abs(ratios[i - 1] - 1.0))) toward_one = false;
    out.details["ratio_monotone_toward_one"] = toward_one;
    return out;
}

}  // namespace

CommandOutput run_command(const ResolvedConfig& config) {
    const auto& c = config.values;
    if (config.command == "estimate-constant") return estimate_constant(c);
    if (config.command == "run-experiment") return run_experiment(c);
    if (config.command == "double-sum") return double_sum(c);
    if (config.command == "oracle") return oracle(c);
    if (config.command == "convergence") return convergence(c);
    throw ConfigError("unknown command '" + config.command + "'");
}

}  // namespace sojourn::cli
