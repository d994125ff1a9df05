#include <algorithm>
#include <cmath>
#include <numbers>

#include "sojourn/berman.hpp"
#include "sojourn/errors.hpp"

namespace sojourn {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    const auto n = static_cast<std::size_t>(order);
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                const double kd = static_cast<double>(k);
                p0 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p2) / kd;
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

namespace {

// W(t) = sqrt(2) xi t - t^2 on [0, S].
struct Parabola {
    double xi;
    double S;

    [[nodiscard]] double at(double t) const noexcept { return std::numbers::sqrt2 * xi * t - t * t; }
    [[nodiscard]] double vertex() const noexcept { return xi / std::numbers::sqrt2; }

    /// Length of {t in [0, S] : W(t) > z}.
    [[nodiscard]] double sojourn(double z) const noexcept {
        const double top = 0.5 * xi * xi;
        if (z >= top) return 0.0;
        const double r = std::sqrt(top - z);
        const double t0 = vertex();
        return std::max(0.0, std::min(S, t0 + r) - std::max(0.0, t0 - r));
    }

    [[nodiscard]] double max() const noexcept { return at(std::clamp(vertex(), 0.0, S)); }
    [[nodiscard]] double min() const noexcept { return std::min(at(0.0), at(S)); }
};

// sup{z : sojourn(z) > x}; the sojourn is continuous and nonincreasing in z.
double level(const Parabola& p, double x) {
    double lo = p.min();
    double hi = p.max();
    if (x == 0.0) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (p.sojourn(mid) > x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double berman2_parabola_oracle(double x, double S, int quadrature_order) {
    if (!(S > 0.0) || !std::isfinite(S)) throw ConfigError("parabola oracle: S must be positive");
    if (!(x >= 0.0)) throw ConfigError("parabola oracle: x must be >= 0");
    if (x >= S) return 0.0;
    const auto [nodes, weights] = gauss_legendre(quadrature_order);

    // Kinks of z_x(xi): the level set {W > z_x} touches 0 or S.
    const double k1 = x / std::numbers::sqrt2;
    const double k2 = std::numbers::sqrt2 * (S - 0.5 * x);
    const double tail = 40.0;
    const double edges[] = {k1 - tail, k1, k2, k2 + tail};

    double total = 0.0;
    for (int panel = 0; panel < 3; ++panel) {
        const double a = edges[panel], b = edges[panel + 1];
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double xi = mid + half * nodes[i];
            const Parabola p{xi, S};
            // e^{z} phi(xi), combined in the exponent to avoid overflow for large |xi|.
            s += weights[i] * std::exp(level(p, x) - 0.5 * xi * xi) / std::sqrt(2.0 * std::numbers::pi);
        }
        total += half * s;
    }
    return total;
}

}  // namespace sojourn
