// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "uvpbr/error.h"
#include "uvpbr/fuse.h"

namespace uvpbr {
namespace {

void observe(ViewMapSet& s, std::size_t i, const Rgb& color, double cos_angle) {
    s.maps.set_valid(i, true);
    s.maps.set_scalar(ViewMapSet::kMask, i, 1);
    s.maps.set_rgb(ViewMapSet::kColor, i, color);
    s.maps.set_rgb(ViewMapSet::kNormal, i, {0, 0, 1});
    s.maps.set_rgb(ViewMapSet::kViewdir, i, {std::sqrt(1 - cos_angle * cos_angle), 0, cos_angle});
}

TEST(Fuse, PicksMostFrontalView) {
    std::vector<ViewMapSet> sets(3, ViewMapSet(4));
    observe(sets[0], 5, {1, 0, 0}, 0.5);
    observe(sets[1], 5, {0, 1, 0}, 0.9);
    observe(sets[2], 5, {0, 0, 1}, 0.7);
    observe(sets[2], 6, {0, 0, 1}, 0.3);
    TexelGrid f = fuse_views(sets);
    EXPECT_EQ(f.rgb("color", 5), (Rgb{0, 1, 0}));
    EXPECT_EQ(f.scalar("winner", 5), 1);
    EXPECT_NEAR(f.scalar("score", 5), 0.9, 1e-6);
    EXPECT_EQ(f.scalar("winner", 6), 2);
    EXPECT_EQ(f.scalar("winner", 0), -1);
    EXPECT_FALSE(f.valid(0));
    EXPECT_EQ(f.valid_count(), 2u);
}

TEST(Fuse, TiesGoToLowestIndex) {
    std::vector<ViewMapSet> sets(3, ViewMapSet(2));
    observe(sets[1], 0, {0, 1, 0}, 0.6);
    observe(sets[2], 0, {0, 0, 1}, 0.6);
    EXPECT_EQ(fuse_views(sets).scalar("winner", 0), 1);
}

// Property: fusion is invariant to reordering views except through tie-breaks.
TEST(Fuse, PermutationInvariantWithoutTies) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 1);
    std::vector<ViewMapSet> sets(4, ViewMapSet(8));
    for (auto& s : sets)
        for (std::size_t i = 0; i < 64; ++i)
            if (u(rng) > 0.4) observe(s, i, {u(rng), u(rng), u(rng)}, u(rng));
    std::vector<ViewMapSet> reversed(sets.rbegin(), sets.rend());
    TexelGrid a = fuse_views(sets), b = fuse_views(reversed);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(a.rgb("color", i), b.rgb("color", i));
}

TEST(Fuse, RejectsEmptyOrMismatched) {
    EXPECT_THROW(fuse_views({}), PreconditionError);
    std::vector<ViewMapSet> sets{ViewMapSet(4), ViewMapSet(8)};
    EXPECT_THROW(fuse_views(sets), PreconditionError);
}

TEST(PullPush, ConstantKnownFillsConstant) {
    Image plane(16, 16, 3);
    std::vector<std::uint8_t> known(256, 0), domain(256, 1);
    for (int i : {3, 77, 200}) {
        known[i] = 1;
        plane.set_rgb(i % 16, i / 16, {0.2, 0.4, 0.6});
    }
    InpaintStats st;
    Image out = pull_push_fill(plane, known, domain, &st);
    EXPECT_EQ(st.filled, 253u);
    EXPECT_FALSE(st.used_fallback);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) EXPECT_NEAR(length(out.rgb(x, y) - Rgb{0.2, 0.4, 0.6}), 0, 1e-6);
}

// Property: filled values are convex combinations of known values, known
// texels are untouched and texels outside the domain are left alone.
TEST(PullPush, FillIsConvexAndRespectsMasks) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    Image plane(37, 23, 1, -7.0f);
    std::vector<std::uint8_t> known(plane.pixel_count()), domain(plane.pixel_count());
    double lo = 1, hi = 0;
    for (std::size_t i = 0; i < known.size(); ++i) {
        known[i] = u(rng) < 0.1;
        domain[i] = u(rng) < 0.8;
        if (known[i]) {
            double v = u(rng);
            plane.data()[i] = static_cast<float>(v);
            lo = std::min(lo, static_cast<double>(plane.data()[i]));
            hi = std::max(hi, static_cast<double>(plane.data()[i]));
        }
    }
    Image out = pull_push_fill(plane, known, domain);
    for (std::size_t i = 0; i < known.size(); ++i) {
        if (known[i] || !domain[i]) {
            EXPECT_EQ(out.data()[i], plane.data()[i]);
            continue;
        }
        EXPECT_GE(out.data()[i], lo - 1e-6);
        EXPECT_LE(out.data()[i], hi + 1e-6);
    }
}

TEST(PullPush, NearbyValuesDominate) {
    Image plane(32, 32, 1);
    std::vector<std::uint8_t> known(1024, 0), domain(1024, 1);
    known[0] = 1;
    plane.data()[0] = 0.0f;
    known[1023] = 1;
    plane.data()[1023] = 1.0f;
    Image out = pull_push_fill(plane, known, domain);
    EXPECT_LT(out.at(1, 1, 0), 0.5);
    EXPECT_GT(out.at(30, 30, 0), 0.5);
}

TEST(PullPush, NothingKnownFallsBackToGray) {
    Image plane(4, 4, 3);
    std::vector<std::uint8_t> known(16, 0), domain(16, 1);
    InpaintStats st;
    Image out = pull_push_fill(plane, known, domain, &st);
    EXPECT_TRUE(st.used_fallback);
    EXPECT_EQ(out.rgb(2, 2), Rgb{0.5});
}

TEST(PullPush, InpaintMarksDomainValid) {
    TexelGrid g(8);
    g.add_plane("color", 3);
    g.set_valid(9, true);
    g.set_rgb("color", 9, {1, 1, 1});
    std::vector<std::uint8_t> domain(64, 0);
    for (int i = 0; i < 32; ++i) domain[i] = 1;
    TexelGrid out = pull_push_inpaint(g, domain);
    EXPECT_EQ(out.valid_count(), 32u);
    EXPECT_EQ(out.rgb("color", 20), Rgb{1.0});
    EXPECT_EQ(out.rgb("color", 40), Rgb{0.0});
    EXPECT_THROW(pull_push_inpaint(g, domain, {"missing"}), PreconditionError);
}

}  // namespace
}  // namespace uvpbr
