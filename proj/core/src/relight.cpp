// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/relight.h"

#include <cmath>
#include <random>

#include "uvpbr/error.h"
#include "uvpbr/parallel.h"
#include "uvpbr/raster.h"

namespace uvpbr {

namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

struct SurfacePoint {
    Vec3 p, n;
    Vec2 uv;
};

SurfacePoint interpolate(const TriMesh& mesh, std::uint32_t face, double b1, double b2) {
    const Face& f = mesh.faces[face];
    double b0 = 1.0 - b1 - b2;
    SurfacePoint s;
    s.p = mesh.vertices[f[0]] * b0 + mesh.vertices[f[1]] * b1 + mesh.vertices[f[2]] * b2;
    if (mesh.has_normals()) {
        s.n = normalize(mesh.normals[f[0]] * b0 + mesh.normals[f[1]] * b1 + mesh.normals[f[2]] * b2);
        if (dot(s.n, s.n) == 0) s.n = mesh.face_normal(face);
    } else {
        s.n = mesh.face_normal(face);
    }
    if (mesh.has_uvs()) s.uv = mesh.uvs[f[0]] * b0 + mesh.uvs[f[1]] * b1 + mesh.uvs[f[2]] * b2;
    return s;
}

}  // namespace

std::vector<LightSample> gather_light_samples(const LightingSetup& setup, const Vec3& p, const Vec3& n,
                                              std::uint64_t stream) {
    std::vector<LightSample> out;
    if (!setup.light) return out;
    const EnvLight& light = *setup.light;

    for (const PointLight& pl : light.points) {
        if (max_component(pl.intensity) <= 0) continue;
        Vec3 d = pl.position - p;
        double r2 = dot(d, d);
        if (r2 <= 0) continue;
        double r = std::sqrt(r2);
        Vec3 l = d / r;
        double cos_theta = dot(n, l);
        if (cos_theta <= 0) continue;
        if (setup.occluder) {
            Ray ray{p + n * setup.shadow_bias, l};
            double t_max = length(pl.position - ray.origin) - setup.shadow_bias;
            if (t_max > 0 && setup.occluder->occluded(ray, 0.0, t_max)) continue;
        }
        out.push_back({l, pl.intensity * (cos_theta / r2)});
    }

    if (setup.env_samples > 0 && !light.latlong.empty() && !light.env_is_black()) {
        std::mt19937_64 rng = stream_rng(setup.seed, stream);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        Vec3 t, b;
        orthonormal_basis(n, t, b);
        const double w = kPi / setup.env_samples;
        for (int s = 0; s < setup.env_samples; ++s) {
            double u1 = uni(rng), u2 = uni(rng);
            double r = std::sqrt(u1), phi = 2.0 * kPi * u2;
            Vec3 l = normalize(t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * std::sqrt(1.0 - u1));
            out.push_back({l, env_sample(light, l) * w});
        }
    }
    return out;
}

Rgb shade(std::span<const LightSample> samples, const Vec3& n, const Vec3& v, const MaterialSample& mat) {
    Rgb sum;
    for (const LightSample& s : samples) sum += brdf::eval_unchecked(n, s.direction, v, mat) * s.weight;
    return sum;
}

RenderResult render_pbr(const TriMesh& mesh, const PbrTextures& pbr, const Camera& cam, const EnvLight& light,
                        const RenderOptions& options) {
    pbr.require_planes();
    if (options.spp < 1) throw PreconditionError("render_pbr: spp must be >= 1");
    if (!mesh.has_uvs()) throw PreconditionError("render_pbr: mesh has no texture coordinates");
    light.validate();

    GBuffer gb = render_gbuffer(mesh, cam);
    MeshIntersector intersector(mesh);
    LightingSetup setup;
    setup.light = &light;
    setup.occluder = options.shadows ? &intersector : nullptr;
    setup.env_samples = options.spp;
    setup.seed = options.seed;
    setup.shadow_bias = options.shadow_bias > 0 ? options.shadow_bias : 1e-3 * mesh.bounds().diagonal();

    RenderResult result{Image(cam.width(), cam.height(), 3), gb.coverage};
    const Vec3 eye = cam.center();
    parallel_for(static_cast<std::size_t>(cam.height()), [&](std::size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < cam.width(); ++x) {
            std::size_t i = gb.index(x, y);
            if (!gb.coverage[i]) continue;
            SurfacePoint s = interpolate(mesh, static_cast<std::uint32_t>(gb.face[i]), gb.b1[i], gb.b2[i]);
            Vec3 v = normalize(eye - s.p);
            auto samples = gather_light_samples(setup, s.p, s.n, i);
            result.color.set_rgb(x, y, shade(samples, s.n, v, pbr.sample_bilinear(s.uv)));
        }
    });
    return result;
}

RenderResult render_unlit(const TriMesh& mesh, const TexelGrid& texture, const std::string& plane,
                          const Camera& cam) {
    if (!texture.has_plane(plane)) throw PreconditionError("render_unlit: texture lacks the '" + plane + "' plane");
    if (!mesh.has_uvs()) throw PreconditionError("render_unlit: mesh has no texture coordinates");
    GBuffer gb = render_gbuffer(mesh, cam);
    RenderResult result{Image(cam.width(), cam.height(), 3), gb.coverage};
    parallel_for(static_cast<std::size_t>(cam.height()), [&](std::size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < cam.width(); ++x) {
            std::size_t i = gb.index(x, y);
            if (!gb.coverage[i]) continue;
            SurfacePoint s = interpolate(mesh, static_cast<std::uint32_t>(gb.face[i]), gb.b1[i], gb.b2[i]);
            result.color.set_rgb(x, y, texture.sample_bilinear(plane, s.uv));
        }
    });
    return result;
}

TexelGrid render_texels(const TexelGrid& attributes, const PbrTextures& pbr, const ViewMapSet& view,
                        const LightingSetup& setup) {
    pbr.require_planes();
    if (attributes.size() != pbr.size() || view.maps.size() != pbr.size())
        throw PreconditionError("render_texels: grid sizes differ");
    TexelGrid out(pbr.size());
    out.add_plane("color", 3);
    parallel_for(out.texel_count(), [&](std::size_t i) {
        if (!view.visible(i)) return;
        Vec3 p = attributes.rgb("position", i);
        Vec3 n = normalize(attributes.rgb("normal", i));
        Vec3 v = view.maps.rgb(ViewMapSet::kViewdir, i);
        auto samples = gather_light_samples(setup, p, n, i);
        out.set_valid(i, true);
        out.set_rgb("color", i, shade(samples, n, v, pbr.material(i)));
    });
    return out;
}

}  // namespace uvpbr
