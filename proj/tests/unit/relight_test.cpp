// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "support/scenes.h"
#include "uvpbr/error.h"
#include "uvpbr/relight.h"
#include "uvpbr/scenegen.h"

namespace uvpbr {
namespace {

TEST(Relight, PointLightFollowsCosineOverDistanceSquared) {
    EnvLight light;
    light.points.push_back({{0, 3, 4}, Rgb{10.0}});
    LightingSetup setup{.light = &light};
    auto samples = gather_light_samples(setup, {0, 0, 0}, {0, 0, 1}, 0);
    ASSERT_EQ(samples.size(), 1u);
    EXPECT_NEAR(samples[0].weight.x, 10.0 * 0.8 / 25.0, 1e-12);
    EXPECT_NEAR(length(samples[0].direction - Vec3{0, 0.6, 0.8}), 0, 1e-12);
    EXPECT_TRUE(gather_light_samples(setup, {0, 0, 0}, {0, 0, -1}, 0).empty());
}

TEST(Relight, ShadowRaysBlockPointLights) {
    TriMesh blocker;
    blocker.vertices = {{-1, -1, 1}, {1, -1, 1}, {0, 1, 1}};
    blocker.faces = {{0, 1, 2}};
    MeshIntersector occ(blocker);
    EnvLight light;
    light.points.push_back({{0, 0, 2}, Rgb{1.0}});
    LightingSetup setup{.light = &light, .occluder = &occ};
    EXPECT_TRUE(gather_light_samples(setup, {0, 0, 0}, {0, 0, 1}, 0).empty());
    setup.occluder = nullptr;
    EXPECT_EQ(gather_light_samples(setup, {0, 0, 0}, {0, 0, 1}, 0).size(), 1u);
}

// Property: each stream is reproducible and independent of evaluation order.
TEST(Relight, EnvSamplesAreKeyedByStream) {
    EnvLight env = gen_env("gradient_sky");
    LightingSetup setup{.light = &env, .env_samples = 16, .seed = 4};
    auto a = gather_light_samples(setup, {}, {0, 0, 1}, 7);
    auto other = gather_light_samples(setup, {}, {0, 0, 1}, 8);
    auto b = gather_light_samples(setup, {}, {0, 0, 1}, 7);
    ASSERT_EQ(a.size(), 16u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].direction, b[i].direction);
    EXPECT_NE(a[0].direction, other[0].direction);
    for (const auto& s : a) EXPECT_GT(s.direction.z, 0);
}

TEST(Relight, UniformEnvIrradianceOnLambertian) {
    EnvLight env = gen_env("uniform", {.intensity = 1.0});
    LightingSetup setup{.light = &env, .env_samples = 4096, .seed = 1};
    auto samples = gather_light_samples(setup, {}, {0, 0, 1}, 0);
    // Cosine sampling makes a Lambertian estimate exact: c_d * L.
    MaterialSample lambert(Rgb{0.6}, 1.0, 0.0);
    Rgb shaded = shade(samples, {0, 0, 1}, {0, 0, 1}, lambert);
    Rgb diffuse_only;
    for (const auto& s : samples) diffuse_only += s.weight * (0.6 / kPi);
    EXPECT_NEAR(diffuse_only.x, 0.6, 1e-12);
    EXPECT_GT(shaded.x, 0.6);
    EXPECT_LT(shaded.x, 0.7);
}

TEST(Relight, UnlitRenderShowsTexture) {
    auto scene = testing::atlas_scene(testing::shape_mesh("sphere", 24), 64);
    PbrTextures tex = gen_pbr("constant", 64, {.diffuse_a = {0.1, 0.2, 0.3}});
    Camera cam = gen_rig("six_view", {.width = 48, .height = 48})[2];
    RenderResult r = render_unlit(scene.atlas.mesh, tex.maps, "diffuse", cam);
    std::size_t covered = 0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            if (!r.coverage[y * 48 + x]) {
                EXPECT_EQ(r.color.rgb(x, y), Rgb{0.0});
                continue;
            }
            ++covered;
            EXPECT_NEAR(length(r.color.rgb(x, y) - Rgb{0.1, 0.2, 0.3}), 0, 1e-6);
        }
    EXPECT_GT(covered, 200u);
    EXPECT_THROW(render_unlit(scene.atlas.mesh, tex.maps, "nope", cam), PreconditionError);
}

TEST(Relight, RenderIsDeterministicAndNonNegative) {
    auto scene = testing::atlas_scene(testing::shape_mesh("torus", 24), 64);
    PbrTextures tex = gen_pbr("checker", 64);
    EnvLight env = gen_env("gradient_sky");
    env.points.push_back({{2, 2, 2}, Rgb{5.0}});
    Camera cam = gen_rig("six_view", {.width = 40, .height = 40})[0];
    RenderResult a = render_pbr(scene.atlas.mesh, tex, cam, env, {.spp = 4, .seed = 3});
    RenderResult b = render_pbr(scene.atlas.mesh, tex, cam, env, {.spp = 4, .seed = 3});
    EXPECT_EQ(a.color, b.color);
    for (float v : a.color.data()) EXPECT_GE(v, 0.0f);
    EXPECT_THROW(render_pbr(scene.atlas.mesh, tex, cam, env, {.spp = 0}), PreconditionError);
}

}  // namespace
}  // namespace uvpbr
