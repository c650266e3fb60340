// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

// Camera model, ray casting and G-buffer rasterization.

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "support/scenes.h"
#include "uvpbr/camera.h"
#include "uvpbr/error.h"
#include "uvpbr/intersect.h"
#include "uvpbr/raster.h"

namespace uvpbr {
namespace {

TEST(Camera, OrbitLooksAtOrigin) {
    Camera c = Camera::orbit(30, 20, 2.7, 40, 320, 240);
    EXPECT_NEAR(length(c.center()), 2.7, 1e-12);
    EXPECT_NEAR(dot(c.forward(), normalize(-c.center())), 1.0, 1e-12);
    auto p = c.project({0, 0, 0});
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->px, 160, 1e-9);
    EXPECT_NEAR(p->py, 120, 1e-9);
    EXPECT_NEAR(p->distance, 2.7, 1e-12);
}

TEST(Camera, ImageRowZeroIsTopAndZIsUp) {
    Camera c = Camera::orbit(0, 0, 3, 40, 100, 100);
    auto above = c.project({0, 0, 0.3});
    auto left = c.project({0, -0.3, 0});  // camera on +X looking back: -Y is to the left
    ASSERT_TRUE(above && left);
    EXPECT_LT(above->py, 50);
    EXPECT_LT(left->px, 50);
}

// Property: ray and project are inverses.
TEST(Camera, RayProjectRoundTrip) {
    Camera c = Camera::orbit(123, -10, 2.5, 35, 64, 48);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        double px = u(rng) * 64, py = u(rng) * 48, t = 0.5 + 3 * u(rng);
        Ray r = c.ray(px, py);
        EXPECT_NEAR(length(r.dir), 1.0, 1e-12);
        auto p = c.project(r.origin + r.dir * t);
        ASSERT_TRUE(p);
        EXPECT_NEAR(p->px, px, 1e-9);
        EXPECT_NEAR(p->py, py, 1e-9);
        EXPECT_NEAR(p->distance, t, 1e-9);
    }
}

TEST(Camera, BehindCameraIsNotProjected) {
    Camera c = Camera::orbit(0, 0, 3, 40, 10, 10);
    EXPECT_FALSE(c.project({6, 0, 0}));
}

TEST(Camera, InvalidParametersThrow) {
    EXPECT_THROW(Camera::orbit(0, 0, -1, 40, 10, 10), InputError);
    EXPECT_THROW(Camera::orbit(0, 0, 2, 0, 10, 10), InputError);
    EXPECT_THROW(Camera::look_at({0, 0, 3}, {0, 0, 0}, {0, 0, 1}, 0.7, 10, 10), InputError);
}

TEST(Camera, JsonRoundTrip) {
    std::vector<Camera> cams{Camera::orbit(10, 20, 2, 30, 40, 50),
                             Camera::look_at({1, 2, 3}, {0, 0, 0}, {0, 0, 1}, 0.6, 33, 22)};
    auto path = std::filesystem::temp_directory_path() / "uvpbr_cameras.json";
    write_cameras(path, cams);
    auto back = read_cameras(path);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].width(), cams[i].width());
        EXPECT_NEAR(length(back[i].center() - cams[i].center()), 0, 1e-9);
        Vec3 q{0.1, -0.2, 0.3};
        EXPECT_NEAR(back[i].project(q)->px, cams[i].project(q)->px, 1e-8);
    }
}

TEST(Intersect, TriangleHitAndMiss) {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    auto hit = intersect_triangle(Ray{{0.2, 0.3, 1}, {0, 0, -1}}, m, 0, 0, 10);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->t, 1, 1e-12);
    EXPECT_NEAR(hit->b1, 0.2, 1e-12);
    EXPECT_NEAR(hit->b2, 0.3, 1e-12);
    EXPECT_FALSE(intersect_triangle(Ray{{0.8, 0.8, 1}, {0, 0, -1}}, m, 0, 0, 10));
    EXPECT_FALSE(intersect_triangle(Ray{{0.2, 0.3, 1}, {0, 0, -1}}, m, 0, 0, 0.5));
}

// Property: the accelerated intersector agrees with brute force.
TEST(Intersect, GridMatchesBruteForce) {
    TriMesh m = testing::shape_mesh("torus", 32);
    MeshIntersector grid(m);
    ASSERT_TRUE(grid.uses_grid());
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 500; ++i) {
        Vec3 o{2 * u(rng), 2 * u(rng), 2 * u(rng)};
        Ray r{o, normalize(Vec3{u(rng), u(rng), u(rng)} * 0.3 - o)};
        auto a = grid.closest(r, 0, 10), b = brute_force_closest(m, r, 0, 10);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (a) {
            EXPECT_NEAR(a->t, b->t, 1e-12);
            EXPECT_EQ(a->face, b->face);
        }
        EXPECT_EQ(grid.occluded(r, 0, 10), b.has_value());
    }
}

// Property: every covered G-buffer pixel matches the closest hit of its center ray.
TEST(Raster, GBufferMatchesRayCast) {
    TriMesh m = testing::shape_mesh("torus", 24);
    Camera c = Camera::orbit(40, 25, 2.7, 40, 48, 40);
    GBuffer gb = render_gbuffer(m, c);
    std::size_t covered = 0, mismatched = 0;
    for (int y = 0; y < gb.height; ++y)
        for (int x = 0; x < gb.width; ++x) {
            auto hit = brute_force_closest(m, c.ray(x + 0.5, y + 0.5), 0, 100);
            if (!gb.covered(x, y)) {
                EXPECT_FALSE(hit) << x << "," << y;
                continue;
            }
            ++covered;
            ASSERT_TRUE(hit);
            EXPECT_NEAR(gb.depth[gb.index(x, y)], hit->t, 1e-6);
            mismatched += gb.face[gb.index(x, y)] == static_cast<std::int32_t>(hit->face) ? 0 : 1;
        }
    EXPECT_GT(covered, 100u);
    // Pixel centers on a shared edge may pick either face.
    EXPECT_LE(mismatched, covered / 100);
    EXPECT_EQ(gb.covered_count(), covered);
}

}  // namespace
}  // namespace uvpbr
