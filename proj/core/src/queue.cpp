#include "sojourn/queue.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "sojourn/errors.hpp"
#include "sojourn/gauss_sim.hpp"
#include "sojourn/normal.hpp"
#include "sojourn/parallel.hpp"
#include "sojourn/sojourn.hpp"
#include "sojourn/stats.hpp"

namespace sojourn {

namespace {

void check_queue(double alpha, double c, double u) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("queue: alpha must lie in (0, 2)");
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("queue: c must be positive");
    if (!(u > 0.0) || !std::isfinite(u)) throw ConfigError("queue: u must be positive");
}

}  // namespace

QueueAsymptotics QueueAsymptotics::make(double alpha, double c, double u) {
    check_queue(alpha, c, u);
    QueueAsymptotics q;
    q.alpha = alpha;
    q.c = c;
    q.u = u;
    q.tau_star = alpha / (c * (2.0 - alpha));
    const double ts_half = std::pow(q.tau_star, alpha / 2.0);
    q.m = (1.0 + c * q.tau_star) / ts_half * std::pow(u, 1.0 - alpha / 2.0);
    q.A = 2.0 / (ts_half * (2.0 - alpha));
    q.B = alpha / (2.0 * ts_half * q.tau_star);
    q.v = queue_scaling(alpha, c, u);
    q.q = q.v / u;
    return q;
}

double QueueAsymptotics::sqrt_2a_over_b() const noexcept { return std::sqrt(2.0 * A / B); }

double queue_scaling(double alpha, double c, double u) {
    check_queue(alpha, c, u);
    const double ts = alpha / (c * (2.0 - alpha));
    // (sqrt(2) ts^alpha / (1 + c ts))^{2/alpha} rearranged so that alpha = 1 stays exact.
    return std::pow(u, 2.0 * (alpha - 1.0) / alpha) * std::pow(2.0, 1.0 / alpha) * ts * ts *
           std::pow(1.0 + c * ts, -2.0 / alpha);
}

double queue_prefactor(const QueueAsymptotics& q, double n, double x, double bhat) {
    if (!(n > x)) throw ConfigError("queue prefactor: n must exceed x");
    if (!(x >= 0.0)) throw ConfigError("queue prefactor: x must be >= 0");
    if (!(bhat >= 0.0)) throw ConfigError("queue prefactor: bhat must be >= 0");
    return bhat * q.sqrt_2a_over_b() * std::sqrt(std::numbers::pi) * q.u / (q.m * q.v) * normal_tail(q.m);
}

QueueWindowEstimate queue_window_probability(const QueueWindowSettings& s) {
    const auto qa = QueueAsymptotics::make(s.alpha, s.c, s.u);
    if (!(s.n > 0.0) || !(s.x >= 0.0)) throw ConfigError("queue window: need n > 0 and x >= 0");
    if (!(s.step > 0.0) || !(s.step < s.n)) throw ConfigError("queue window: step must lie in (0, n)");
    if (s.n_samples == 0) throw ConfigError("queue window: n_samples must be positive");

    const GridSpec grid = GridSpec::with_step(0.0, qa.v * s.n, qa.v * s.step);
    const std::size_t points = grid.n_points;
    const double dt = grid.step();
    const std::size_t need = required_count(dt, qa.v * s.x);
    const bool conditional = s.alpha == 1.0;

    const ChunkPlan plan = ChunkPlan::make(s.n_samples, s.chunk_size);
    struct Worker {
        std::unique_ptr<PathSampler> path;
        std::vector<double> y, thresholds;
    };
    auto make_worker = [&] {
        Worker w;
        w.y.resize(points);
        if (conditional) {
            w.thresholds.reserve(points);
        } else {
            w.path = std::make_unique<PathSampler>(process::Queue{s.alpha, s.c, s.horizon_mult, s.u}, grid);
        }
        return w;
    };
    auto run = [&](Worker& w, std::size_t chunk) {
        StreamRng rng(StreamId{s.seed, s.purpose, chunk});
        double sum = 0.0;
        for (std::size_t i = 0; i < plan.count(chunk); ++i) {
            if (!conditional) {
                w.path->sample(rng, w.y);
                const auto above = std::count_if(w.y.begin(), w.y.end(), [&](double q) { return q > s.u; });
                sum += static_cast<std::size_t>(above) >= need ? 1.0 : 0.0;
                continue;
            }
            // Brownian window Y(t) = B(t) - c t.
            rng.fill_normal(std::span<double>(w.y).subspan(1));
            const double sd = std::sqrt(dt);
            w.y[0] = 0.0;
            for (std::size_t j = 1; j < points; ++j) w.y[j] = w.y[j - 1] + sd * w.y[j] - s.c * dt;
            // In-window drawup D_j = max_{i>=j} Y_i - Y_j; the rest of Q_j is Y_N - Y_j + R.
            double run_max = w.y[points - 1];
            std::size_t always = 0;
            w.thresholds.clear();
            for (std::size_t j = points; j-- > 0;) {
                run_max = std::max(run_max, w.y[j]);
                if (run_max - w.y[j] > s.u)
                    ++always;
                else
                    w.thresholds.push_back(s.u - (w.y[points - 1] - w.y[j]));
            }
            if (always >= need) {
                sum += 1.0;
                continue;
            }
            const std::size_t k = need - always;
            if (k > w.thresholds.size()) continue;
            std::nth_element(w.thresholds.begin(), w.thresholds.begin() + static_cast<std::ptrdiff_t>(k - 1),
                             w.thresholds.end());
            const double r = w.thresholds[k - 1];
            sum += r <= 0.0 ? 1.0 : std::exp(-2.0 * s.c * r);
        }
        return sum;
    };
    const auto sums = run_chunks(0, plan.chunks(), s.workers, make_worker, run);
    BatchTable table(plan.chunks(), 1);
    for (std::size_t c = 0; c < plan.chunks(); ++c) {
        table.add_count(c, plan.count(c));
        table.add(c, 0, sums[c]);
    }
    return {table.mean(0), table.std_err(0), table.total_count(), conditional ? "brownian-conditional" : "path"};
}

}  // namespace sojourn
