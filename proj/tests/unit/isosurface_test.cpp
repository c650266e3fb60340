// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include <gtest/gtest.h>

#include "support/scenes.h"
#include "uvpbr/error.h"
#include "uvpbr/isosurface.h"

namespace uvpbr {
namespace {

using testing::sdf_mesh;
using testing::shape_mesh;

TEST(Isosurface, EmptyAndFullGridsGiveNoSurface) {
    DensityGrid g(8, Bounds3{{-1, -1, -1}, {1, 1, 1}});
    EXPECT_TRUE(marching_cubes(g).empty());
    for (double& v : g.values()) v = 1.0;
    EXPECT_TRUE(marching_cubes(g).empty());
}

TEST(Isosurface, SingleHotNodeMakesClosedOctahedronLikeSurface) {
    DensityGrid g(5, Bounds3{{-1, -1, -1}, {1, 1, 1}});
    g.at(2, 2, 2) = 1.0;
    TriMesh m = marching_cubes(g);
    ASSERT_FALSE(m.empty());
    EXPECT_EQ(euler_characteristic(m), 2);
    EXPECT_EQ(connected_components(m), 1u);
    // Crossings sit halfway along each edge from the hot node.
    for (const Vec3& p : m.vertices) EXPECT_NEAR(std::abs(p.x) + std::abs(p.y) + std::abs(p.z), 0.25, 1e-12);
}

TEST(Isosurface, ClosedShapesHaveExpectedGenus) {
    EXPECT_EQ(euler_characteristic(shape_mesh("sphere", 32)), 2);
    EXPECT_EQ(euler_characteristic(shape_mesh("cube", 32)), 2);
    EXPECT_EQ(euler_characteristic(shape_mesh("torus", 48)), 0);
    EXPECT_EQ(connected_components(shape_mesh("union", 48, {.center_a = {-0.6, 0, 0}, .center_b = {0.6, 0, 0},
                                                             .radius_a = 0.3, .radius_b = 0.3})),
              2u);
}

TEST(Isosurface, NormalsPointOutward) {
    TriMesh m = shape_mesh("sphere", 24);
    ASSERT_TRUE(m.has_normals());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_GT(dot(m.normals[i], m.vertices[i]), 0.9 * length(m.vertices[i]));
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        const Face& t = m.faces[f];
        Vec3 c = (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3.0;
        EXPECT_GT(dot(m.face_normal(f), c), 0);
    }
}

// Property: extraction error shrinks with resolution.
TEST(Isosurface, ErrorShrinksWithResolution) {
    auto worst = [](int res) {
        double w = 0;
        for (const Vec3& p : shape_mesh("sphere", res).vertices) w = std::max(w, std::abs(length(p) - 0.6));
        return w;
    };
    EXPECT_LT(worst(48), worst(16));
    EXPECT_LT(worst(32), 1.5 * 2.0 / 32);
}

TEST(Isosurface, GridRoundTrip) {
    DensityGrid g = gen_density("torus", 12);
    auto stem = std::filesystem::temp_directory_path() / "uvpbr_iso_grid";
    write_grid(stem, g);
    DensityGrid back = read_grid(stem);
    EXPECT_EQ(back.resolution(), 12);
    ASSERT_EQ(back.values().size(), g.values().size());
    for (std::size_t i = 0; i < g.values().size(); ++i)
        EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(g.values()[i])));
    EXPECT_THROW(read_grid(stem.string() + "_missing"), InputError);
}

TEST(Isosurface, ArbitrarySdfSurface) {
    TriMesh m = sdf_mesh([](const Vec3& p) { return std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}) - 0.4; }, 30);
    Bounds3 b = m.bounds();
    EXPECT_NEAR(b.hi.x, 0.4, 2.0 / 29);
    EXPECT_NEAR(b.lo.z, -0.4, 2.0 / 29);
}

}  // namespace
}  // namespace uvpbr
