#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sojourn/circulant.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/gauss_sim.hpp"
#include "sojourn/stats.hpp"

namespace sojourn {
namespace {

double fbm_cov(double a, double s, double t) {
    return 0.5 * (std::pow(s, a) + std::pow(t, a) - std::pow(std::abs(t - s), a));
}

TEST(SimulateFbm, PinnedAtOrigin) {
    const auto p = simulate_fbm(1.0, GridSpec::with_step(0.0, 1.0, 1.0 / 100), 9);
    EXPECT_EQ(p.values.front(), 0.0);
}

TEST(SimulateFbm, AlphaTwoIsALine) {
    const auto p = simulate_fbm(2.0, GridSpec::with_step(0.0, 1.0, 1.0 / 50), 3);
    const double slope = p.values.back() / p.grid.at(p.grid.n_points - 1);
    for (std::size_t i = 1; i < p.values.size(); ++i) EXPECT_NEAR(p.values[i], slope * p.grid.at(i), 1e-9);
}

TEST(SimulateFbm, RejectsGridNotStartingAtZero) {
    EXPECT_THROW((void)simulate_fbm(1.0, GridSpec{0.5, 1.0, 10}, 1), ConfigError);
}

TEST(SimulateFbm, DeterministicGivenSeed) {
    const GridSpec g = GridSpec::with_step(0.0, 1.0, 1.0 / 64);
    EXPECT_EQ(simulate_fbm(0.7, g, 5).values, simulate_fbm(0.7, g, 5).values);
    EXPECT_NE(simulate_fbm(0.7, g, 5).values, simulate_fbm(0.7, g, 6).values);
}

TEST(FbmSampler, CovarianceAtHalfAndOne) {
    const GridSpec g{0.0, 1.0, 3};
    FbmSampler s(1.0, g);
    const int n = 200000;
    std::vector<double> x(3);
    double sum = 0, sum2 = 0;
    StreamRng rng({11, 0, 0});
    for (int i = 0; i < n; ++i) {
        s.sample(rng, x);
        const double v = x[1] * x[2];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 0.5, 3.0 * se);
}

TEST(FbmSampler, IncrementVariance) {
    const double alpha = 0.5;
    const GridSpec g{0.0, 1.0, 17};
    FbmSampler s(alpha, g);
    const int n = 100000;
    std::vector<double> x(g.n_points);
    std::vector<double> s1(g.n_points, 0.0), s2(g.n_points, 0.0);
    StreamRng rng({12, 0, 0});
    for (int i = 0; i < n; ++i) {
        s.sample(rng, x);
        for (std::size_t k = 1; k < x.size(); ++k) {
            const double d = (x[k] - x[0]) * (x[k] - x[0]);
            s1[k] += d;
            s2[k] += d * d;
        }
    }
    for (std::size_t k = 1; k < x.size(); k += 4) {
        const double mean = s1[k] / n;
        const double se = std::sqrt((s2[k] / n - mean * mean) / n);
        EXPECT_NEAR(mean, std::pow(g.at(k), alpha), 3.5 * se) << "k=" << k;
        EXPECT_NEAR(mean, fbm_cov(alpha, g.at(k), g.at(k)), 3.5 * se);
    }
}

TEST(FbmSampler, SelfSimilarityMoments) {
    // B(ct) / c^{alpha/2} has the law of B(t): compare second and fourth moments at t = 1, c = 3.
    const double alpha = 1.4;
    const GridSpec g{0.0, 3.0, 4};
    FbmSampler s(alpha, g);
    const int n = 100000;
    std::vector<double> x(4);
    double a2 = 0, a4 = 0, b2 = 0, b4 = 0;
    StreamRng rng({13, 0, 0});
    const double scale = std::pow(3.0, alpha / 2.0);
    for (int i = 0; i < n; ++i) {
        s.sample(rng, x);
        const double a = x[1], b = x[3] / scale;
        a2 += a * a;
        a4 += a * a * a * a;
        b2 += b * b;
        b4 += b * b * b * b;
    }
    EXPECT_NEAR(a2 / n, b2 / n, 3.0 * std::sqrt(2.0 / n) * 2.0);
    EXPECT_NEAR(a4 / n, b4 / n, 3.0 * std::sqrt(96.0 / n) * 2.0);
}

TEST(PathSampler, FbmWIsZeroAtOrigin) {
    const auto p = simulate_path(process::FbmW{1.0, {0.5, 1.0}}, GridSpec::with_step(0.0, 1.0, 0.01), 2);
    EXPECT_EQ(p.values.front(), 0.0);
}

TEST(PathSampler, StationaryAutocorrelation) {
    const process::StationaryExp1D spec{2.0, 1.0};
    const GridSpec g = GridSpec::with_step(0.0, 1.0, 0.125);
    PathSampler s(spec, g);
    const int n = 100000;
    std::vector<double> x(g.n_points);
    std::vector<double> c(4, 0.0), c2(4, 0.0);
    StreamRng rng({14, 0, 0});
    for (int i = 0; i < n; ++i) {
        s.sample(rng, x);
        for (std::size_t k = 0; k < 4; ++k) {
            const double v = x[2] * x[2 + k];
            c[k] += v;
            c2[k] += v * v;
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        const double mean = c[k] / n;
        const double se = std::sqrt((c2[k] / n - mean * mean) / n);
        EXPECT_NEAR(mean, std::exp(-2.0 * 0.125 * static_cast<double>(k)), 3.5 * se) << "lag " << k;
    }
}

TEST(PathSampler, ChiSquareMarginal) {
    const process::Chi spec{2, {1.0, 1.0}};
    const GridSpec g = GridSpec::with_step(0.0, 1.0, 0.25);
    PathSampler s(spec, g);
    const int n = 100000;
    std::vector<double> x(g.n_points), sq(n);
    StreamRng rng({15, 0, 0});
    for (int i = 0; i < n; ++i) {
        s.sample(rng, x);
        sq[i] = x[2] * x[2];
    }
    // chi-square with 2 degrees of freedom: F(y) = 1 - exp(-y/2).
    EXPECT_LT(ks_distance(sq, [](double y) { return 1.0 - std::exp(-y / 2.0); }), 0.01);
}

TEST(PathSampler, QueueMeanIsStationary) {
    process::Queue spec{1.0, 1.0, 5.0, 2.0};
    const GridSpec g = GridSpec::with_step(0.0, 4.0, 1.0 / 32);
    PathSampler s(spec, g);
    const int n = 4000;
    std::vector<double> x(g.n_points);
    std::vector<std::size_t> idx{0, g.n_points / 2, g.n_points - 1};
    std::vector<double> m(3, 0.0), m2(3, 0.0);
    StreamRng rng({16, 0, 0});
    for (int i = 0; i < n; ++i) {
        s.sample(rng, x);
        for (std::size_t k = 0; k < 3; ++k) {
            m[k] += x[idx[k]];
            m2[k] += x[idx[k]] * x[idx[k]];
        }
    }
    auto se = [&](std::size_t k) { return std::sqrt((m2[k] / n - (m[k] / n) * (m[k] / n)) / n); };
    for (std::size_t k = 1; k < 3; ++k)
        EXPECT_NEAR(m[k] / n, m[0] / n, 3.0 * std::hypot(se(0), se(k)));
    // Reflected Brownian motion with drift -1 and unit variance: E Q = 1/2 (grid and horizon bias push it down).
    EXPECT_LT(m[0] / n, 0.5 + 3.0 * se(0));
    EXPECT_GT(m[0] / n, 0.35);
}

TEST(FieldSampler, ScaledVarianceArgmaxAndVariance) {
    process::ScaledVariance2D spec{{1.0, 1.0, 1.0, 1.0}, 1.0, 2.0, 2.0, 1.0, 0.1, -0.2};
    const Lattice2D lat{GridSpec{-1.0, 1.0, 21}, GridSpec{-1.0, 1.0, 21}};
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < 21; ++i)
        for (std::size_t j = 0; j < 21; ++j) {
            const double s = spec.sigma(lat.axis1.at(i), lat.axis2.at(j));
            EXPECT_LE(s, 1.0);
            if (s > best) best = s, bi = i, bj = j;
        }
    EXPECT_EQ(bi, lat.axis1.nearest(0.1));
    EXPECT_EQ(bj, lat.axis2.nearest(-0.2));

    FieldSampler fs(spec, lat);
    std::vector<double> f(lat.size());
    const int n = 20000;
    double v = 0.0, v2 = 0.0;
    StreamRng rng({17, 0, 0});
    const std::size_t corner = 0;
    for (int i = 0; i < n; ++i) {
        fs.sample(rng, f);
        v += f[corner] * f[corner];
        v2 += std::pow(f[corner], 4);
    }
    const double sig2 = std::pow(spec.sigma(-1.0, -1.0), 2);
    const double se = std::sqrt((v2 / n - (v / n) * (v / n)) / n);
    EXPECT_NEAR(v / n, sig2, 3.5 * se);
}

TEST(Circulant, NonEmbeddableCovarianceReportsEigenvalue) {
    // A covariance sequence that is not positive definite.
    const LagCovariance bad = [](std::size_t lag) { return lag == 0 ? 1.0 : (lag < 4 ? 0.9 : 0.0); };
    try {
        (void)StationaryFactor::build_circulant_strict(bad, 64);
        FAIL() << "expected EmbeddingError";
    } catch (const EmbeddingError& e) {
        EXPECT_LT(e.most_negative_eigenvalue(), 0.0);
    }
}

TEST(Circulant, LargeFbmGridUsesCirculant) {
    FbmSampler s(1.0, GridSpec::with_step(0.0, 64.0, 1.0 / 64));
    ASSERT_NE(s.factor_report(), nullptr);
    EXPECT_EQ(s.factor_report()->method, FactorReport::Method::circulant);
}

}  // namespace
}  // namespace sojourn
