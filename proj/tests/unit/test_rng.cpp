#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "sojourn/rng.hpp"

namespace sojourn {
namespace {

TEST(Philox, KnownAnswerZeroCounterZeroKey) {
    const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
    const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(StreamRng, SameStreamSameDraws) {
    StreamRng a({7, 3, 11}), b({7, 3, 11});
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(StreamRng, DistinctStreamsDiffer) {
    StreamRng a({7, 3, 11}), b({7, 3, 12}), c({7, 4, 11}), d({8, 3, 11});
    const auto x = a();
    EXPECT_NE(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
}

TEST(StreamRng, UniformInOpenUnitInterval) {
    StreamRng r({1, 2, 3});
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000.0, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(StreamRng, NormalMoments) {
    StreamRng r({5, 0, 0});
    std::vector<double> z(200000);
    r.fill_normal(z);
    double m1 = 0, m2 = 0, m4 = 0;
    for (double v : z) {
        m1 += v;
        m2 += v * v;
        m4 += v * v * v * v;
    }
    const double n = static_cast<double>(z.size());
    EXPECT_NEAR(m1 / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(m4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(SubPurpose, ChildrenAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t p = 0; p < 20; ++p)
        for (std::uint64_t c = 0; c < 100; ++c) seen.insert(sub_purpose(p * 1000003, c));
    EXPECT_EQ(seen.size(), 2000u);
}

}  // namespace
}  // namespace sojourn
