// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "support/scenes.h"
#include "uvpbr/atlas.h"
#include "uvpbr/error.h"

namespace uvpbr {
namespace {

using testing::atlas_scene;
using testing::shape_mesh;

TEST(Atlas, ChartRectanglesAreDisjointAndInside) {
    Atlas a = unwrap(shape_mesh("torus", 32), 256);
    ASSERT_GT(a.charts.size(), 6u);
    for (std::size_t i = 0; i < a.charts.size(); ++i) {
        const Chart& c = a.charts[i];
        EXPECT_GE(c.rect_x, 0);
        EXPECT_GE(c.rect_y, 0);
        EXPECT_LE(c.rect_x + c.rect_w, 256);
        EXPECT_LE(c.rect_y + c.rect_h, 256);
        for (std::size_t j = i + 1; j < a.charts.size(); ++j) {
            const Chart& d = a.charts[j];
            bool apart = c.rect_x + c.rect_w <= d.rect_x || d.rect_x + d.rect_w <= c.rect_x ||
                         c.rect_y + c.rect_h <= d.rect_y || d.rect_y + d.rect_h <= c.rect_y;
            EXPECT_TRUE(apart) << i << " vs " << j;
        }
    }
}

TEST(Atlas, EveryFaceBelongsToOneChartAndKeepsOrder) {
    TriMesh src = shape_mesh("sphere", 24);
    Atlas a = unwrap(src, 128);
    ASSERT_EQ(a.mesh.faces.size(), src.faces.size());
    ASSERT_EQ(a.face_chart.size(), src.faces.size());
    std::vector<int> seen(src.faces.size(), 0);
    for (const Chart& c : a.charts)
        for (auto f : c.faces) ++seen[f];
    for (int s : seen) EXPECT_EQ(s, 1);
    for (std::size_t f = 0; f < src.faces.size(); ++f)
        for (int k = 0; k < 3; ++k)
            EXPECT_EQ(a.mesh.vertices[a.mesh.faces[f][k]], src.vertices[src.faces[f][k]]);
}

// Property: the chart map is a uniform-scale projection, so UV distances scale
// world distances projected onto the chart plane.
TEST(Atlas, UniformTexelDensity) {
    Atlas a = unwrap(shape_mesh("cube", 24), 256);
    for (std::size_t f = 0; f < a.mesh.faces.size(); ++f) {
        const Face& t = a.mesh.faces[f];
        std::size_t c = a.face_chart[f];
        for (int k = 0; k < 3; ++k) {
            Vec2 uv = a.world_to_uv(c, a.mesh.vertices[t[k]]);
            EXPECT_NEAR(uv.x, a.mesh.uvs[t[k]].x, 1e-9);
            EXPECT_NEAR(uv.y, a.mesh.uvs[t[k]].y, 1e-9);
        }
        Vec2 p0 = a.project(c, a.mesh.vertices[t[0]]), p1 = a.project(c, a.mesh.vertices[t[1]]);
        Vec2 u0 = a.mesh.uvs[t[0]], u1 = a.mesh.uvs[t[1]];
        double world = std::hypot(p1.x - p0.x, p1.y - p0.y), uv = std::hypot(u1.x - u0.x, u1.y - u0.y);
        EXPECT_NEAR(uv * 256, world * a.texels_per_unit, 1e-6);
    }
}

TEST(Atlas, RasterizedAttributesAreConsistent) {
    RasterStats stats;
    TriMesh src = shape_mesh("sphere", 24);
    Atlas a = unwrap(src, 128);
    TexelGrid g = rasterize_attributes(a, &stats);
    EXPECT_EQ(stats.overlap_texels, 0u);
    ASSERT_GT(g.valid_count(), 2000u);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x) {
            std::size_t i = g.index(x, y);
            if (!g.valid(i)) {
                EXPECT_EQ(g.scalar("mask", i), 0.0);
                continue;
            }
            Vec3 p = g.rgb("position", i);
            EXPECT_NEAR(length(p), 0.6, 2.0 / 24);
            EXPECT_NEAR(length(g.rgb("normal", i)), 1.0, 0.05);
            auto chart = static_cast<std::size_t>(g.scalar("chart_id", i));
            Vec2 uv = a.world_to_uv(chart, p);
            Vec2 c = g.texel_center(x, y);
            EXPECT_NEAR(uv.x, c.x, 1e-5);
            EXPECT_NEAR(uv.y, c.y, 1e-5);
        }
}

TEST(Atlas, TooSmallTextureNamesRequiredSize) {
    try {
        unwrap(shape_mesh("torus", 32), 8);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("required"), std::string::npos);
    }
}

TEST(Atlas, DilationFillsGuttersOnly) {
    auto s = atlas_scene(shape_mesh("sphere", 20), 64);
    TexelGrid d = dilate_gutters(s.attributes, 2);
    EXPECT_EQ(d.valid_mask(), s.attributes.valid_mask());
    EXPECT_EQ(d.plane("mask"), s.attributes.plane("mask"));
    std::size_t filled = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            std::size_t i = d.index(x, y);
            if (s.attributes.valid(i)) {
                EXPECT_EQ(d.rgb("position", i), s.attributes.rgb("position", i));
                continue;
            }
            if (d.rgb("normal", i) == Rgb{0.0}) continue;
            ++filled;
            bool near_valid = false;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    int xx = x + dx, yy = y + dy;
                    if (xx >= 0 && yy >= 0 && xx < 64 && yy < 64 && s.attributes.valid(d.index(xx, yy))) near_valid = true;
                }
            EXPECT_TRUE(near_valid);
        }
    EXPECT_GT(filled, 0u);
}

TEST(Atlas, SeamMaskMarksChartBorders) {
    auto s = atlas_scene(shape_mesh("sphere", 20), 64);
    auto seam = seam_mask(s.attributes, 1);
    std::size_t marked = 0, interior = 0;
    for (std::size_t i = 0; i < seam.size(); ++i) {
        if (!s.attributes.valid(i)) {
            EXPECT_EQ(seam[i], 0);
            continue;
        }
        (seam[i] ? marked : interior) += 1;
    }
    EXPECT_GT(marked, 0u);
    EXPECT_GT(interior, marked);
}

}  // namespace
}  // namespace uvpbr
