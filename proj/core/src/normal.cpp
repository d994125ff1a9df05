#include "sojourn/normal.hpp"

#include <cmath>
#include <numbers>

#include "sojourn/errors.hpp"

namespace sojourn {

double normal_tail(double u) noexcept {
    return 0.5 * std::erfc(u / std::numbers::sqrt2);
}

double normal_density(double u) noexcept {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_tail_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_tail_inverse: p must lie in (0, 1)");
    // Bracket then Newton on log Psi, which is concave and well scaled in the tails.
    double lo = -40.0, hi = 40.0;
    double u = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double psi = normal_tail(u);
        if (psi > p) lo = u; else hi = u;
        const double step = (psi - p) / normal_density(u);
        double next = u + step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) < 1e-15 * (1.0 + std::abs(u))) return next;
        u = next;
    }
    return u;
}

}  // namespace sojourn
