#include <gtest/gtest.h>

#include <cmath>

#include "roughpam/rng.hpp"
#include "roughpam/stats.hpp"

using namespace roughpam;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
    auto a = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(a, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    auto b = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(b, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    auto c = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(c, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, LanesMatchSingleBlock) {
    std::uint32_t out[4 * Philox4x32::kLanes];
    const Philox4x32::Key key{7, 9};
    Philox4x32::encrypt_lanes(100, 3, 4, key, out);
    for (int l = 0; l < Philox4x32::kLanes; ++l) {
        const std::uint64_t blk = 100 + static_cast<std::uint64_t>(l);
        const auto ref = Philox4x32::encrypt(
            {static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32), 3, 4}, key);
        for (int w = 0; w < 4; ++w) EXPECT_EQ(out[4 * l + w], ref[static_cast<std::size_t>(w)]);
    }
}

TEST(RngStream, DeterministicAndStreamSeparated) {
    RngStream a(5, 1), b(5, 1), c(5, 2);
    int same = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a(), y = b(), z = c();
        EXPECT_EQ(x, y);
        same += x == z;
    }
    EXPECT_LT(same, 3);
}

TEST(RngStream, UniformAndNormalMoments) {
    RngStream r(11, stream_id(stream_tag::kNoise, 3));
    RunningStats u, z, z2;
    std::vector<double> buf(1 << 16);
    for (int i = 0; i < 200000; ++i) {
        const double v = r.uniform();
        ASSERT_GT(v, 0.0);
        ASSERT_LT(v, 1.0);
        u.add(v);
    }
    r.fill_normal(buf.data(), buf.size());
    for (double v : buf) {
        z.add(v);
        z2.add(v * v);
    }
    EXPECT_NEAR(u.mean(), 0.5, 4.0 * u.std_error());
    EXPECT_NEAR(z.mean(), 0.0, 4.0 * z.std_error());
    EXPECT_NEAR(z2.mean(), 1.0, 4.0 * z2.std_error());
}

TEST(RunningStats, MergeMatchesSequential) {
    RunningStats all, left, right;
    for (int i = 0; i < 100; ++i) {
        const double v = std::sin(i * 0.37) * 3.0 + i * 0.01;
        all.add(v);
        (i < 37 ? left : right).add(v);
    }
    left.merge(right);
    EXPECT_EQ(left.count(), all.count());
    EXPECT_NEAR(left.mean(), all.mean(), 1e-14);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
}
