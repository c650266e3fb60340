// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "support/scenes.h"
#include "uvpbr/backproject.h"
#include "uvpbr/error.h"
#include "uvpbr/intersect.h"
#include "uvpbr/relight.h"

namespace uvpbr {
namespace {

void add_quad(TriMesh& m, double half, double z) {
    auto base = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), {{-half, -half, z}, {half, -half, z}, {half, half, z}, {-half, half, z}});
    m.normals.insert(m.normals.end(), 4, Vec3{0, 0, 1});
    m.faces.push_back({base, base + 1, base + 2});
    m.faces.push_back({base, base + 2, base + 3});
}

struct Stack {
    TriMesh mesh;
    testing::AtlasScene scene;
    Camera cam = Camera::look_at({0.2, 0.1, 3}, {0, 0, 0}, {0, 1, 0}, 0.8, 96, 96);
};

Stack stacked_quads() {
    Stack s;
    add_quad(s.mesh, 1.0, 0.0);
    add_quad(s.mesh, 0.3, 0.5);
    s.scene = testing::atlas_scene(s.mesh, 128);
    return s;
}

TEST(Backproject, ConstantImageLandsOnVisibleTexels) {
    Stack s = stacked_quads();
    Image img(96, 96, 3);
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) img.set_rgb(x, y, {0.25, 0.5, 0.75});
    GBuffer gb = render_gbuffer(s.scene.atlas.mesh, s.cam);
    ViewMapSet v = backproject_view(s.scene.attributes, img, s.cam, gb, s.scene.atlas.mesh);
    std::size_t seen = 0;
    for (std::size_t i = 0; i < v.maps.texel_count(); ++i) {
        if (!v.visible(i)) {
            EXPECT_EQ(v.maps.rgb(ViewMapSet::kColor, i), Rgb{0.0});
            continue;
        }
        ++seen;
        EXPECT_NEAR(length(v.maps.rgb(ViewMapSet::kColor, i) - Rgb{0.25, 0.5, 0.75}), 0, 1e-6);
        EXPECT_EQ(v.maps.scalar(ViewMapSet::kMask, i), 1.0);
        Vec3 vd = v.maps.rgb(ViewMapSet::kViewdir, i);
        EXPECT_NEAR(length(vd), 1.0, 1e-6);
        Vec3 p = v.maps.rgb(ViewMapSet::kPosition, i);
        EXPECT_NEAR(length(normalize(s.cam.center() - p) - vd), 0, 1e-6);
    }
    EXPECT_GT(seen, 1000u);
}

// Property: visibility equals a brute-force ray cast toward the camera.
TEST(Backproject, OcclusionMatchesBruteForce) {
    Stack s = stacked_quads();
    const TriMesh& mesh = s.scene.atlas.mesh;
    GBuffer gb = render_gbuffer(mesh, s.cam);
    ViewMapSet v = backproject_view(s.scene.attributes, Image(96, 96, 3), s.cam, gb, mesh);
    double bias = resolve_depth_bias(mesh, {});
    std::size_t hidden = 0;
    for (std::size_t i = 0; i < s.scene.attributes.texel_count(); ++i) {
        if (!s.scene.attributes.valid(i)) continue;
        Vec3 p = s.scene.attributes.rgb("position", i);
        Vec3 c = s.cam.center();
        double d = length(p - c);
        bool blocked = brute_force_closest(mesh, Ray{c, (p - c) / d}, 0, d - bias).has_value();
        hidden += blocked ? 1 : 0;
        EXPECT_EQ(v.visible(i), !blocked) << i;
    }
    EXPECT_GT(hidden, 100u);
}

TEST(Backproject, GrazingAndBackFacingTexelsAreRejected) {
    TriMesh m;
    add_quad(m, 1.0, 0.0);
    auto scene = testing::atlas_scene(m, 64);
    Camera below = Camera::look_at({0, 0, -3}, {0, 0, 0}, {0, 1, 0}, 0.8, 32, 32);
    Camera grazing = Camera::look_at({6, 0, 0.3}, {0, 0, 0}, {0, 0, 1}, 0.8, 32, 32);
    for (const Camera& cam : {below, grazing}) {
        ViewMapSet v = backproject_view(scene.attributes, Image(32, 32, 3), cam, render_gbuffer(scene.atlas.mesh, cam),
                                        scene.atlas.mesh);
        EXPECT_EQ(v.maps.valid_count(), 0u);
    }
}

TEST(Backproject, MismatchedInputsThrow) {
    Stack s = stacked_quads();
    GBuffer gb = render_gbuffer(s.scene.atlas.mesh, s.cam);
    EXPECT_THROW(backproject_view(s.scene.attributes, Image(10, 10, 3), s.cam, gb, s.scene.atlas.mesh),
                 PreconditionError);
    TexelGrid bare(128);
    EXPECT_THROW(backproject_view(bare, Image(96, 96, 3), s.cam, gb, s.scene.atlas.mesh), PreconditionError);
    EXPECT_THROW(backproject_all(s.scene.attributes, s.scene.atlas.mesh, std::span<const View>{}), PreconditionError);
}

TEST(Backproject, CoverageCountsUnion) {
    Stack s = stacked_quads();
    std::vector<View> views{{Image(96, 96, 3), s.cam}};
    BackprojectResult r = backproject_all(s.scene.attributes, s.scene.atlas.mesh, views);
    EXPECT_EQ(r.valid_texels, s.scene.attributes.valid_count());
    EXPECT_EQ(r.seen_texels, r.sets[0].maps.valid_count());
    EXPECT_LT(r.union_coverage(), 1.0);
}

}  // namespace
}  // namespace uvpbr
