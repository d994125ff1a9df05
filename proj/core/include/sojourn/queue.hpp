#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace sojourn {

/// Scaling quantities of the reflected fBm queue Q(t) = sup_{s>=t}(B(s) - B(t) - c(s - t)) at level u.
struct QueueAsymptotics {
    double alpha = 1.0;
    double c = 1.0;
    double u = 1.0;
    double tau_star = 0.0;  // alpha / (c (2 - alpha))
    double m = 0.0;         // (1 + c tau*) / tau*^{alpha/2} * u^{1 - alpha/2}
    double A = 0.0;         // tau*^{-alpha/2} * 2 / (2 - alpha)
    double B = 0.0;         // tau*^{-alpha/2 - 1} * alpha / 2
    double v = 0.0;         // u^{2(alpha-1)/alpha} (sqrt(2) tau*^alpha / (1 + c tau*))^{2/alpha}
    double q = 0.0;         // v / u

    [[nodiscard]] static QueueAsymptotics make(double alpha, double c, double u);
    [[nodiscard]] double sqrt_2a_over_b() const noexcept;
};

/// v(u) of the queue family.
[[nodiscard]] double queue_scaling(double alpha, double c, double u);

/// Short-interval prediction of P(int_{[0, v(u) n]} I(Q(t) > u) dt > v(u) x):
///   bhat * sqrt(2 pi A / B) * u / (m(u) v(u)) * Psi(m(u)),
/// where bhat = H_alpha * B_alpha(x, [0, n]) is supplied by the caller.
[[nodiscard]] double queue_prefactor(const QueueAsymptotics& q, double n, double x, double bhat);

struct QueueWindowSettings {
    double alpha = 1.0;
    double c = 1.0;
    double u = 4.0;
    double n = 2.0;
    double x = 0.0;
    /// Grid step in units of v(u).
    double step = 1.0 / 512.0;
    std::size_t n_samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t purpose = 0;
    std::size_t chunk_size = 0;
    unsigned workers = 1;
    double horizon_mult = 5.0;  // only used by the path method
};

struct QueueWindowEstimate {
    double probability = 0.0;
    double std_err = 0.0;
    std::size_t n_samples = 0;
    /// "brownian-conditional": exact future supremum beyond the window (alpha = 1);
    /// "path": queue paths with a truncated lookahead.
    std::string method;
};

/// Monte Carlo of P(int_{[0, v(u) n]} I(Q(t) > u) dt > v(u) x) on a grid.
///
/// For alpha = 1 the workload beyond the window is sup_{s>=w}(Y(s) - Y(w)) ~ Exp(2c),
/// independent of the window, so the probability is averaged in closed form over it
/// and only the window path is simulated. Other alpha simulate Q with the lookahead
/// horizon_mult * tau* * u.
[[nodiscard]] QueueWindowEstimate queue_window_probability(const QueueWindowSettings& settings);

}  // namespace sojourn
