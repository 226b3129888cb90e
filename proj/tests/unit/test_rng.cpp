#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "jdweak/rng.hpp"

using namespace jdweak;

// Known-answer vectors of the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerPi) {
    const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RandomStream, SameKeySameSequence) {
    RandomStream a(static_cast<std::uint64_t>(-7), 12345, StreamId::wiener);
    RandomStream b(static_cast<std::uint64_t>(-7), 12345, StreamId::wiener);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsAndIndicesDiffer) {
    RandomStream a(1, 0, StreamId::wiener);
    RandomStream b(1, 0, StreamId::marks);
    RandomStream c(1, 1, StreamId::wiener);
    RandomStream d(2, 0, StreamId::wiener);
    const auto x = a.next_u64();
    EXPECT_NE(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
}

TEST(RandomStream, UniformInOpenInterval) {
    RandomStream r(3, 0, StreamId::marks);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RandomStream, NormalAndExponentialMoments) {
    RandomStream r(11, 4, StreamId::wiener);
    const int n = 200000;
    double s1 = 0, s2 = 0, e1 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
        e1 += r.exponential();
    }
    const double mean = s1 / n, var = s2 / n - mean * mean;
    EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(n));
    EXPECT_LT(std::abs(var - 1.0), 3.0 * std::sqrt(2.0 / n));
    EXPECT_LT(std::abs(e1 / n - 1.0), 3.0 / std::sqrt(n));
}
