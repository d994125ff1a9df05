// Acceptance run: one PASS/FAIL line per criterion.
//   sojourn_acceptance [--workdir DIR] [--only N[,N...]] [--workers N]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli/app.hpp"
#include "sojourn/asymptotics.hpp"
#include "sojourn/berman.hpp"
#include "sojourn/gauss_sim.hpp"
#include "sojourn/queue.hpp"
#include "sojourn/sojourn.hpp"

namespace fs = std::filesystem;
using namespace sojourn;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned g_workers = 1;
fs::path g_workdir = "acceptance_runs";

// --- 1: fBm covariance ------------------------------------------------------------------

Outcome fbm_covariance() {
    const GridSpec grid{0.0, 1.0, 64};
    const std::size_t n = 200000;
    const std::size_t p = grid.n_points;
    std::string detail;
    bool pass = true;
    for (double alpha : {0.5, 1.0, 1.5}) {
        FbmSampler sampler(alpha, grid);
        std::vector<double> s1(p * p, 0.0), s2(p * p, 0.0), x(p);
        StreamRng rng({1, 0x434f56ULL, static_cast<std::uint64_t>(alpha * 10)});
        for (std::size_t k = 0; k < n; ++k) {
            sampler.sample(rng, x);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = i; j < p; ++j) {
                    const double v = x[i] * x[j];
                    s1[i * p + j] += v;
                    s2[i * p + j] += v * v;
                }
        }
        double worst = 0.0;  // largest |error| / tolerance
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j) {
                const double s = grid.at(i), t = grid.at(j);
                const double exact = 0.5 * (std::pow(s, alpha) + std::pow(t, alpha) - std::pow(std::abs(t - s), alpha));
                const double mean = s1[i * p + j] / n;
                const double se = std::sqrt(std::max(0.0, s2[i * p + j] / n - mean * mean) / n);
                worst = std::max(worst, std::abs(mean - exact) / std::max(3.0 * se, 0.01));
            }
        pass = pass && worst <= 1.0;
        detail += fmt("alpha=%.1f max|err|/tol=%.3f; ", alpha, worst);
    }
    return {pass, detail};
}

// --- 2: oracle equivalence at alpha = 2 ---------------------------------------------------

Outcome oracle_equivalence() {
    const double exact0 = 1.0 + 1.0 / std::sqrt(std::numbers::pi);
    const double o0 = berman2_parabola_oracle(0.0, 1.0);
    bool pass = fmt("%.5g", o0) == fmt("%.5g", exact0) && std::abs(o0 - exact0) < 5e-6;
    std::string detail = fmt("oracle(0)=%.7f; ", o0);
    McSettings s;
    s.n_samples = 1000000;
    s.grid_step = 1.0 / 4096;
    s.seed = 2;
    s.workers = g_workers;
    const std::vector<double> xs{0.0, 0.2, 0.5};
    const auto curve = berman_1d_curve(2.0, {}, xs, Interval{0.0, 1.0}, s);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto& e = curve.points[k];
        const double o = berman2_parabola_oracle(xs[k], 1.0);
        const double z = (e.value - o) / e.std_err;
        pass = pass && std::abs(z) <= 2.0;
        detail += fmt("x=%.1f mc=%.5f+-%.5f oracle=%.5f z=%.2f; ", xs[k], e.value, e.std_err, o, z);
    }
    return {pass, detail};
}

// --- 3: Pickands recovery ----------------------------------------------------------------

Outcome pickands_recovery() {
    const std::vector<double> schedule{4.0, 8.0, 16.0};
    bool pass = true;
    std::string detail;
    const std::pair<double, double> cases[] = {{1.0, 1.0}, {2.0, 1.0 / std::sqrt(std::numbers::pi)}};
    for (const auto& [alpha, h] : cases) {
        McSettings s;
        s.n_samples = 100000;
        s.grid_step = 1.0 / 1024;
        s.seed = 3;
        s.workers = g_workers;
        const auto est = estimate_berman_1d_limit(alpha, 0.0, schedule, s);
        const double rel = est.limit.value / h - 1.0;
        pass = pass && std::abs(rel) <= 0.05;
        detail += fmt("alpha=%.0f slope=%.4f+-%.4f target=%.4f rel=%+.3f; ", alpha, est.limit.value,
                      est.limit.std_err, h, rel);
    }
    return {pass, detail};
}

// --- 4: direct vs product B-hat ----------------------------------------------------------

Outcome bhat_identity() {
    const std::vector<double> schedule{8.0, 16.0, 32.0};
    bool pass = true;
    std::string detail;
    for (const auto& alphas : {std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}}) {
        McSettings s;
        s.n_samples = 40000;
        s.grid_step = 1.0 / 64;
        s.seed = 4;
        s.workers = g_workers;
        const auto b = estimate_bhat(alphas, 0.5, 2.0, schedule, s);
        const double se = std::hypot(b.direct.std_err, b.product.std_err);
        const double z = (b.direct.value - b.product.value) / se;
        pass = pass && std::abs(z) <= 2.0 && b.direct.value > 0.0 && b.product.value > 0.0;
        detail += fmt("(%.0f,%.0f) direct=%.4f product=%.4f z=%.2f; ", alphas[0], alphas[1], b.direct.value,
                      b.product.value, z);
    }
    return {pass, detail};
}

// --- 5: exact reduction property suite -----------------------------------------------------

// Integral of I(sojourn(z) > x) e^z over [lo, hi] using only sojourn_time: the indicator is
// monotone in z, so its single switch point is located by bisection and e^z is integrated
// with Gauss-Legendre panels on a uniform z-grid up to that point.
double z_quadrature(std::span<const double> v, double cell, double x, double lo, double hi) {
    auto above = [&](double z) { return sojourn_time(v, cell, z) > x; };
    if (!above(lo)) return 0.0;
    double a = lo, b = hi;
    while (b - a > 1e-13 * std::max(1.0, std::abs(b))) {
        const double m = 0.5 * (a + b);
        (above(m) ? a : b) = m;
    }
    const double top = a;
    static const auto gl = gauss_legendre(8);
    const int panels = 256;
    const double h = (top - lo) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = lo + (p + 0.5) * h;
        for (std::size_t k = 0; k < gl.first.size(); ++k) sum += gl.second[k] * std::exp(c + 0.5 * h * gl.first[k]);
    }
    return 0.5 * h * sum;
}

Outcome reduction_suite() {
    std::size_t checked = 0, quad_fail = 0, mono_fail = 0, vanish_fail = 0, equiv_fail = 0;
    double worst = 0.0;
    StreamRng pick({5, 0x524544ULL, 0});
    std::vector<double> scratch;
    for (std::size_t path_id = 0; path_id < 1000; ++path_id) {
        const double alpha = 0.2 + 1.8 * pick.uniform();
        const double length = 0.5 + 3.5 * pick.uniform();
        const double step = length / static_cast<double>(32 + static_cast<int>(pick.uniform() * 480));
        const DriftSpec drift{pick.uniform() < 0.5 ? 0.0 : 2.0 * pick.uniform(), 0.5 + pick.uniform()};
        const GridSpec grid = GridSpec::with_step(0.0, length, step);
        const auto path = simulate_path(process::FbmW{alpha, drift}, grid, 1000 + path_id);
        const double cell = grid.step();
        const SojournProfile prof(path.view(), cell);
        const double sup = supremum(path);
        const double lo = *std::min_element(path.values.begin(), path.values.end()) - 40.0;

        // Reduction: e^{z_x} against the z-quadrature.
        for (double frac : {0.0, 0.1, 0.37, 0.8}) {
            const double x = frac * prof.total_measure();
            const double direct = z_quadrature(path.view(), cell, x, lo, sup + 1.0);
            const double reduced = level_for_sojourn(prof, x).exp();
            const double rel = std::abs(direct - reduced) / reduced;
            worst = std::max(worst, rel);
            if (!(rel <= 1e-6)) ++quad_fail;
            ++checked;
        }
        // Monotonicity in x and u, sup identity, event equivalence.
        double prev = INFINITY;
        for (int k = 0; k <= 50; ++k) {
            const auto z = level_for_sojourn(prof, prof.total_measure() * k / 40.0);
            const double zv = z.is_minus_infinity() ? -INFINITY : z.value();
            if (zv > prev) ++mono_fail;
            prev = zv;
        }
        if (level_for_sojourn(prof, 0.0).value() != sup) ++equiv_fail;
        double prev_m = INFINITY;
        for (int k = 0; k <= 60; ++k) {
            const double u = lo + 40.0 + (sup + 0.5 - lo - 40.0) * k / 60.0;
            const double m = sojourn_time(path, u);
            if (m > prev_m) ++mono_fail;
            prev_m = m;
            if ((m > 0.0) != (sup > u)) ++equiv_fail;
        }
        // Vanishing: x at or beyond the total measure.
        for (double extra : {0.0, cell, 10.0})
            if (!level_for_sojourn(prof, prof.total_measure() + extra).is_minus_infinity()) ++vanish_fail;
        if (level_for_sojourn(path.view(), cell, prof.total_measure(), scratch).exp() != 0.0) ++vanish_fail;
    }
    // End-to-end: estimates on shared samples are monotone in x and vanish at the domain length.
    McSettings s;
    s.n_samples = 2000;
    s.grid_step = 1.0 / 64;
    s.seed = 5;
    const std::vector<double> xs{0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 2.0, 3.0};
    for (auto sampler : {Sampler::tilted, Sampler::plain}) {
        s.sampler = sampler;
        const auto c = berman_1d_curve(1.2, {}, xs, Interval{0.0, 2.0}, s);
        for (std::size_t k = 1; k < xs.size(); ++k)
            if (c.points[k].value > c.points[k - 1].value) ++mono_fail;
        if (c.points[6].value != 0.0 || c.points[7].value != 0.0) ++vanish_fail;
    }
    const bool pass = quad_fail == 0 && mono_fail == 0 && vanish_fail == 0 && equiv_fail == 0;
    return {pass, fmt("%zu reductions, worst rel err %.2e; failures: quadrature %zu, monotone %zu, vanishing %zu, "
                      "equivalence %zu",
                      checked, worst, quad_fail, mono_fail, vanish_fail, equiv_fail)};
}

// --- 6: conditional-limit trend -------------------------------------------------------------

Outcome conditional_trend() {
    ExperimentSettings s;
    s.T1 = 2.0;
    s.delta = 0.05;
    s.n_target_conditioned = 20000;
    s.max_paths = 20'000'000;
    s.chunk_size = 5000;
    s.target_samples = 100000;
    s.seed = 6;
    s.workers = g_workers;
    const std::vector<double> levels{2.5, 3.0, 3.5};
    const std::vector<double> xs{0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
    const std::pair<const char*, ScalingFamily> families[] = {
        {"chi1", family::Chi{1.0, 1.0, 1}},
        {"chi2", family::Chi{1.0, 1.0, 2}},
        {"stationary", family::Stationary1D{1.0, 1.0}},
    };
    bool pass = true;
    std::string detail;
    for (const auto& [name, f] : families) {
        const auto ladder = conditional_sojourn_ladder(f, s, levels, xs);
        bool ok = sup_distance_nonincreasing(ladder);
        detail += std::string(name) + " d=";
        for (const auto& r : ladder) {
            ok = ok && r.n_conditioned >= 500 && r.ratio_hat.front() == 1.0;
            detail += fmt("%.4f(n=%zu) ", r.sup_distance, r.n_conditioned);
        }
        detail += ok ? "ok; " : "FAIL; ";
        pass = pass && ok;
    }
    return {pass, detail};
}

// --- 7: double-sum diagnostic ---------------------------------------------------------------

Outcome double_sum_trend() {
    DoubleSumSettings s;
    s.u = 3.0;
    s.T = 4.0;
    s.n_schedule = {2.0, 4.0, 8.0};
    s.n_paths = 200000;
    s.seed = 7;
    s.workers = g_workers;
    const auto r = double_sum_diagnostic(family::Stationary1D{1.0, 1.0}, s);
    std::string detail;
    for (const auto& p : r.points) detail += fmt("n=%g ratio=%.4f+-%.4f; ", p.n, p.ratio, p.ratio_se);
    return {r.ratio_decreasing(), detail};
}

// --- 8: queue scaling and prefactor trend ----------------------------------------------------

Outcome queue_sanity() {
    bool closed = true;
    for (double u : {0.5, 1.0, 4.0, 6.0, 8.0, 100.0}) {
        const auto q = QueueAsymptotics::make(1.0, 1.0, u);
        closed = closed && scaling_function(family::Queue{1.0, 1.0}, u) == 0.5 && q.tau_star == 1.0 && q.A == 2.0 &&
                 q.B == 0.5 && q.m == 2.0 * std::sqrt(u);
    }
    std::string detail = closed ? "closed forms exact; " : "closed forms WRONG; ";

    const double n = 2.0, step = 1.0 / 512;
    McSettings bs;
    bs.n_samples = 200000;
    bs.grid_step = step;
    bs.seed = 8;
    bs.workers = g_workers;
    bs.purpose = 0x42484154ULL;
    const double bhat = estimate_berman_1d(1.0, {}, 0.0, Interval{0.0, n}, bs).value;  // H_1 = 1
    std::vector<double> ratios;
    for (double u : {4.0, 6.0, 8.0}) {
        QueueWindowSettings qs;
        qs.u = u;
        qs.n = n;
        qs.step = step;
        qs.n_samples = 1000000;
        qs.seed = 8;
        qs.purpose = static_cast<std::uint64_t>(u);
        qs.workers = g_workers;
        const auto mc = queue_window_probability(qs);
        const double pred = queue_prefactor(QueueAsymptotics::make(1.0, 1.0, u), n, 0.0, bhat);
        ratios.push_back(pred / mc.probability);
        detail += fmt("u=%g pred/mc=%.4f (mc se %.2f%%); ", u, ratios.back(), 100.0 * mc.std_err / mc.probability);
    }
    bool toward = true;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        toward = toward && std::abs(ratios[i] - 1.0) < std::abs(ratios[i - 1] - 1.0);
    return {closed && toward, detail};
}

// --- 9: reproducibility from manifests -------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "sojourn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const cli::EnvLookup no_env = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), no_env, out, err);
    if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return code;
}

Outcome reproducibility() {
    const std::vector<std::vector<std::string>> runs{
        {"estimate-constant", "--family", "berman1d", "--alpha", "1.5", "--x", "0,0.2,0.6", "--n-samples", "3000"},
        {"estimate-constant", "--family", "berman2d-limit", "--alpha", "1", "--alpha2", "1.5", "--x", "0,0.5",
         "--schedule", "2,3,4", "--n-samples", "500", "--grid-step", "1/16"},
        {"estimate-constant", "--family", "bhat", "--alphas", "1,1.5", "--x", "0.5", "--n1", "2", "--schedule",
         "2,3,4", "--n-samples", "500", "--grid-step", "1/16"},
        {"run-experiment", "--family", "chi", "--m", "2", "--levels", "2,2.5", "--x-grid", "0,0.5,1",
         "--n-target-conditioned", "300", "--chunk-size", "500", "--target-samples", "500"},
        {"run-experiment", "--family", "queue", "--levels", "1,1.5", "--x-grid", "0,0.5,1",
         "--n-target-conditioned", "200", "--chunk-size", "200", "--target-samples", "500", "--T1", "1"},
        {"double-sum", "--u", "2.5", "--n-paths", "4000"},
        {"oracle", "--x", "0,0.2,0.5", "--S", "1,2"},
        {"convergence", "--mode", "grid", "--grid-steps", "1/16,1/32", "--n-samples", "500"},
        {"convergence", "--mode", "queue", "--levels", "3,4", "--n-samples", "2000", "--bhat-samples", "2000",
         "--step", "1/128"},
    };
    std::size_t identical = 0;
    std::string detail;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& cmd = runs[i].front();
        const fs::path a = g_workdir / fmt("repro_%zu_a", i), b = g_workdir / fmt("repro_%zu_b", i);
        fs::remove_all(a);
        fs::remove_all(b);
        auto first = runs[i];
        first.insert(first.end(), {"--seed", fmt("%zu", 900 + i), "--workers", "1", "--out", a.string()});
        if (cli(first) != 0) {
            detail += cmd + " failed; ";
            continue;
        }
        if (cli({cmd, "--config", (a / (cmd + ".manifest.json")).string(), "--workers", "3", "--out", b.string()}) !=
            0) {
            detail += cmd + " rerun failed; ";
            continue;
        }
        const std::string ca = slurp(a / (cmd + ".csv")), cb = slurp(b / (cmd + ".csv"));
        if (!ca.empty() && ca == cb)
            ++identical;
        else
            detail += cmd + " differs; ";
    }
    detail += fmt("%zu/%zu reruns byte-identical (workers 1 vs 3)", identical, runs.size());
    return {identical == runs.size(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--workdir" && i + 1 < argc) {
            g_workdir = argv[++i];
        } else if (a == "--workers" && i + 1 < argc) {
            g_workers = static_cast<unsigned>(std::stoul(argv[++i]));
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string t; std::getline(ss, t, ',');) only.insert(std::stoi(t));
        } else {
            std::fprintf(stderr, "usage: %s [--workdir DIR] [--workers N] [--only N[,N...]]\n", argv[0]);
            return 2;
        }
    }
    fs::create_directories(g_workdir);

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"fbm covariance", fbm_covariance},
        {"oracle equivalence alpha=2", oracle_equivalence},
        {"pickands recovery", pickands_recovery},
        {"bhat direct vs product", bhat_identity},
        {"exact reduction suite", reduction_suite},
        {"conditional-limit trend", conditional_trend},
        {"double-sum trend", double_sum_trend},
        {"queue scaling and prefactor trend", queue_sanity},
        {"reproducibility from manifests", reproducibility},
    };
    int failures = 0;
    for (int k = 1; k <= 9; ++k) {
        if (!only.empty() && !only.count(k)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k - 1].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("CRITERION %d %s: %s [%.0fs] %s\n", k, o.pass ? "PASS" : "FAIL", criteria[k - 1].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
