#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sojourn/asymptotics.hpp"
#include "sojourn/errors.hpp"

namespace sojourn {
namespace {

TEST(ScalingFunction, Stationary2D) {
    EXPECT_NEAR(scaling_function(family::Stationary2D{1.0, 1.0, 1.0, 1.0}, 10.0), 1e-4, 1e-18);
}

TEST(ScalingFunction, ChiAlphaTwo) { EXPECT_NEAR(scaling_function(family::Chi{1.0, 2.0, 1}, 10.0), 0.1, 1e-15); }

TEST(ScalingFunction, QueueBrownianIsHalf) {
    for (double u : {0.5, 2.0, 7.0, 1e3}) EXPECT_EQ(scaling_function(family::Queue{1.0, 1.0}, u), 0.5);
}

TEST(ScalingFunction, Stationary1D) {
    EXPECT_NEAR(scaling_function(family::Stationary1D{2.0, 1.0}, 3.0), 0.5 / 9.0, 1e-15);
}

TEST(ScalingFunction, OnePointUsesMinimumExponent) {
    // alpha1 < beta1: a1^{-1/alpha1} u^{-2/alpha1}; alpha2 > beta2: u^{-2/beta2}.
    const family::OnePoint2D f{4.0, 3.0, 1.0, 2.0, 1.0, 1.0, 2.0, 1.0};
    EXPECT_NEAR(scaling_function(f, 2.0), 0.25 * 0.25 * 0.25, 1e-15);
}

TEST(ScalingFunction, RejectsOutOfRange) {
    EXPECT_THROW((void)scaling_function(family::Queue{2.0, 1.0}, 1.0), ConfigError);
    EXPECT_THROW((void)scaling_function(family::Chi{1.0, 1.0, 0}, 1.0), ConfigError);
    EXPECT_THROW((void)scaling_function(family::Stationary1D{1.0, 2.5}, 1.0), ConfigError);
    EXPECT_THROW((void)scaling_function(family::Stationary1D{1.0, 1.0}, 0.0), ConfigError);
}

TEST(OnePointTarget, Table) {
    const auto t = onepoint_target(family::OnePoint2D{2.0, 3.0, 1.0, 2.0, 5.0, 7.0, 1.0, 1.0});
    // Axis 1: alpha == beta -> alpha-hat = alpha, a-bar = 1/a.
    EXPECT_EQ(t.alpha_hat[0], 1.0);
    EXPECT_DOUBLE_EQ(t.drift[0].coefficient, 2.5);
    EXPECT_FALSE(t.degenerate[0]);
    // Axis 2: alpha > beta -> pure drift with a-bar = 1.
    EXPECT_EQ(t.alpha_hat[1], 0.0);
    EXPECT_DOUBLE_EQ(t.drift[1].coefficient, 7.0);
    EXPECT_TRUE(t.degenerate[1]);
    EXPECT_EQ(t.rule.normalization_exponent(), 0);

    const auto s = onepoint_target(family::OnePoint2D{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0});
    EXPECT_TRUE(s.drift[0].is_zero());
    EXPECT_TRUE(s.drift[1].is_zero());
    EXPECT_EQ(s.rule.normalization_exponent(), 2);
}

ExperimentSettings small_settings() {
    ExperimentSettings s;
    s.n_target_conditioned = 300;
    s.min_conditioned = 500;
    s.chunk_size = 500;
    s.max_paths = 200000;
    s.target_samples = 500;
    s.delta = 0.1;
    s.seed = 77;
    return s;
}

TEST(ConditionalSojourn, RatioAtZeroIsOneAndCurveMonotone) {
    const auto s = small_settings();
    const std::vector<double> xs{0.0, 0.25, 0.5, 1.0, 4.0};
    const std::vector<double> levels{2.0};
    const auto ladder = conditional_sojourn_ladder(family::Stationary1D{1.0, 1.0}, s, levels, xs);
    ASSERT_EQ(ladder.size(), 1u);
    const auto& r = ladder[0];
    EXPECT_EQ(r.ratio_hat.front(), 1.0);
    for (std::size_t k = 1; k < r.ratio_hat.size(); ++k) {
        EXPECT_LE(r.ratio_hat[k], r.ratio_hat[k - 1]);
        EXPECT_GE(r.ratio_hat[k], 0.0);
        EXPECT_LE(r.ci_lo[k], r.ratio_hat[k]);
        EXPECT_GE(r.ci_hi[k], r.ratio_hat[k]);
    }
    EXPECT_EQ(r.target.front(), 1.0);
    for (std::size_t k = 1; k < r.target.size(); ++k) EXPECT_LE(r.target[k], r.target[k - 1]);
    EXPECT_GE(r.n_conditioned, 300u);
    // Fewer than 500 conditioned replicates must be flagged.
    bool low = false;
    for (const auto& f : r.flags) low = low || f == "low-confidence";
    EXPECT_TRUE(low);
}

TEST(ConditionalSojourn, BeyondDomainIsZero) {
    auto s = small_settings();
    s.T1 = 1.0;
    const double v = scaling_function(family::Stationary1D{1.0, 1.0}, 2.0);
    const std::vector<double> xs{0.0, 1.0 / v + 1.0};
    const std::vector<double> levels{2.0};
    const auto r = conditional_sojourn_ladder(family::Stationary1D{1.0, 1.0}, s, levels, xs)[0];
    EXPECT_EQ(r.ratio_hat.back(), 0.0);
}

TEST(ConditionalSojourn, DeterministicAcrossWorkers) {
    auto a = small_settings(), b = small_settings();
    b.workers = 3;
    const std::vector<double> xs{0.0, 0.5};
    const std::vector<double> levels{2.0};
    const family::Chi f{1.0, 1.0, 2};
    const auto ra = conditional_sojourn_ladder(f, a, levels, xs)[0];
    const auto rb = conditional_sojourn_ladder(f, b, levels, xs)[0];
    EXPECT_EQ(ra.ratio_hat, rb.ratio_hat);
    EXPECT_EQ(ra.target, rb.target);
    EXPECT_EQ(ra.n_paths, rb.n_paths);
}

TEST(ConditionalSojourn, QueueBoundedExcludesDomainEnd) {
    auto s = small_settings();
    s.T1 = 1.0;
    const std::vector<double> xs{0.0, 0.5, 1.0};
    const std::vector<double> levels{1.0};
    const auto r = conditional_sojourn_ladder(family::Queue{1.0, 1.0}, s, levels, xs)[0];
    ASSERT_EQ(r.excluded_x.size(), 1u);
    EXPECT_EQ(r.excluded_x[0], 1.0);
    EXPECT_EQ(r.x_grid.size(), 2u);
    EXPECT_FALSE(r.notes.empty());
}

TEST(SupDistanceTrend, Nonincreasing) {
    std::vector<ExperimentResult> l(3);
    l[0].sup_distance = 0.3;
    l[1].sup_distance = 0.2;
    l[2].sup_distance = 0.2;
    EXPECT_TRUE(sup_distance_nonincreasing(l));
    l[2].sup_distance = 0.25;
    EXPECT_FALSE(sup_distance_nonincreasing(l));
}

TEST(DoubleSum, SingleBlockIsRejected) {
    DoubleSumSettings s;
    s.u = 3.0;
    s.T = 0.1;
    s.n_schedule = {8.0};
    s.n_paths = 100;
    EXPECT_THROW((void)double_sum_diagnostic(family::Stationary1D{1.0, 1.0}, s), ConfigError);
}

TEST(DoubleSum, UnsupportedFamilyIsRejected) {
    DoubleSumSettings s;
    EXPECT_THROW((void)double_sum_diagnostic(family::Chi{1.0, 1.0, 1}, s), ConfigError);
}

TEST(DoubleSum, IndependentBlocksStayBelowBound) {
    DoubleSumSettings s;
    s.u = 2.0;
    s.n_schedule = {2.0, 4.0};
    s.n_paths = 20000;
    s.seed = 5;
    s.independent_blocks = true;
    const auto r = double_sum_diagnostic(family::Stationary1D{1.0, 1.0}, s);
    for (const auto& p : r.points) {
        EXPECT_GE(p.blocks, 2u);
        EXPECT_LE(p.ratio, p.independence_bound + 3.0 * p.ratio_se);
    }
}

}  // namespace
}  // namespace sojourn
