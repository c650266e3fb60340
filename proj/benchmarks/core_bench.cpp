// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "support/scenes.h"
#include "uvpbr/brdf.h"
#include "uvpbr/decompose.h"
#include "uvpbr/metrics.h"
#include "uvpbr/raster.h"
#include "uvpbr/relight.h"

namespace uvpbr {
namespace {

void BM_BrdfEval(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> dirs(1024);
    for (Vec3& d : dirs) d = normalize(Vec3{u(rng), u(rng), std::abs(u(rng)) + 0.05});
    const Vec3 n{0, 0, 1};
    const MaterialSample mat({0.6, 0.4, 0.2}, 0.5, 0.3);
    std::size_t k = 0;
    for (auto _ : state) {
        Rgb f = brdf::eval_unchecked(n, dirs[k % 1024], dirs[(k + 7) % 1024], mat);
        benchmark::DoNotOptimize(f);
        ++k;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BrdfEval);

void BM_MarchingCubes(benchmark::State& state) {
    DensityGrid grid = gen_density("torus", static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(marching_cubes(grid));
}
BENCHMARK(BM_MarchingCubes)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GBuffer(benchmark::State& state) {
    TriMesh mesh = testing::shape_mesh("torus", 64);
    Camera cam = gen_rig("six_view").front();
    for (auto _ : state) benchmark::DoNotOptimize(render_gbuffer(mesh, cam));
}
BENCHMARK(BM_GBuffer)->Unit(benchmark::kMillisecond);

void BM_TexelFit(benchmark::State& state) {
    static const EnvLight light = gen_env("three_point");
    const MaterialSample truth({0.5, 0.3, 0.7}, 0.45, 0.0);
    TexelObservation obs;
    obs.normal = normalize(Vec3{0.2, -0.1, 1});
    obs.lights = gather_light_samples(LightingSetup{.light = &light}, {}, obs.normal, 0);
    for (int k = 0; k < 6; ++k) {
        double az = 2 * kPi * k / 6, el = (k % 2 ? 25.0 : 55.0) * kPi / 180;
        Vec3 v{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
        obs.viewdirs.push_back(v);
        obs.visible.push_back(1);
        obs.colors.push_back(shade(obs.lights, obs.normal, v, truth));
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_texel_full(obs));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TexelFit)->Unit(benchmark::kMicrosecond);

void BM_NearestNeighbor(benchmark::State& state) {
    TriMesh mesh = testing::shape_mesh("torus", 64);
    std::vector<Vec3> pts = sample_surface(mesh, static_cast<std::size_t>(state.range(0)), 1);
    std::vector<Vec3> queries = sample_surface(mesh, 4096, 2);
    PointIndex index(pts);
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.nearest(queries[k % queries.size()]));
        ++k;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NearestNeighbor)->Arg(10000)->Arg(100000);

}  // namespace
}  // namespace uvpbr

BENCHMARK_MAIN();
