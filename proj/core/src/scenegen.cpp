// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/scenegen.h"

#include <cmath>

#include "uvpbr/error.h"

namespace uvpbr {

double shape_distance(const std::string& shape, const ShapeParams& params, const Vec3& p) {
    if (shape == "sphere") return length(p) - params.radius;
    if (shape == "cube") {
        Vec3 q{std::abs(p.x) - params.half_size, std::abs(p.y) - params.half_size, std::abs(p.z) - params.half_size};
        Vec3 outside = max(q, Vec3{0.0});
        return length(outside) + std::min(max_component(q), 0.0);
    }
    if (shape == "torus") {
        double ring = std::hypot(p.x, p.y) - params.major_radius;
        return std::hypot(ring, p.z) - params.minor_radius;
    }
    if (shape == "union")
        return std::min(length(p - params.center_a) - params.radius_a, length(p - params.center_b) - params.radius_b);
    throw InputError("unknown shape '" + shape + "' (expected sphere, cube, torus or union)");
}

DensityGrid gen_density(const std::string& shape, int resolution, const ShapeParams& params) {
    if (resolution < 8) throw PreconditionError("gen_density: resolution must be >= 8");
    shape_distance(shape, params, {});  // rejects unknown names before allocating
    DensityGrid grid(resolution, Bounds3{{-1, -1, -1}, {1, 1, 1}});
    const double h = grid.spacing().x;
    for (int k = 0; k < resolution; ++k)
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i) {
                double d = shape_distance(shape, params, grid.node_position(i, j, k));
                grid.at(i, j, k) = std::clamp(0.5 - d / h, 0.0, 1.0);
            }
    return grid;
}

PbrTextures gen_pbr(const std::string& pattern, int texel_size, const PbrParams& params, const TexelGrid* atlas) {
    if (texel_size < 16) throw PreconditionError("gen_pbr: texel_size must be >= 16");
    if (params.period < 1) throw PreconditionError("gen_pbr: period must be >= 1");
    if (atlas && atlas->size() != texel_size) throw PreconditionError("gen_pbr: atlas size differs from texel_size");
    if (pattern != "constant" && pattern != "checker" && pattern != "gradient" && pattern != "two_material")
        throw InputError("unknown texture pattern '" + pattern +
                         "' (expected constant, checker, gradient or two_material)");

    PbrTextures pbr(texel_size);
    for (int y = 0; y < texel_size; ++y)
        for (int x = 0; x < texel_size; ++x) {
            std::size_t i = pbr.maps.index(x, y);
            Vec2 uv = pbr.maps.texel_center(x, y);
            bool odd = ((x / params.period) + (y / params.period)) % 2 == 1;
            MaterialSample m;
            if (pattern == "constant") {
                m = {params.diffuse_a, params.roughness, params.metalness};
            } else if (pattern == "checker") {
                m = {odd ? params.diffuse_b : params.diffuse_a, params.roughness, params.metalness};
            } else if (pattern == "gradient") {
                Rgb c{0.2 + 0.6 * uv.x, 0.2 + 0.6 * uv.y, 0.8 - 0.6 * uv.x};
                double rho = params.roughness_from + (params.roughness_to - params.roughness_from) * uv.x;
                m = {c, rho, params.metalness};
            } else {
                m = odd ? MaterialSample(params.diffuse_b, 0.1, 1.0) : MaterialSample(params.diffuse_a, 0.8, 0.0);
            }
            pbr.set_material(i, m);
            pbr.maps.set_rgb(PbrTextures::kBakedColor, i, m.diffuse());
            pbr.maps.set_valid(i, atlas ? atlas->valid(i) : true);
        }
    if (atlas) pbr.maps.clear_invalid();
    return pbr;
}

std::vector<Camera> gen_rig(const std::string& preset, const RigOptions& options) {
    std::vector<Camera> cams;
    if (preset == "six_view") {
        for (int k = 0; k < 6; ++k)
            cams.push_back(Camera::orbit(30.0 + 60.0 * k, k % 2 == 0 ? 20.0 : -10.0, options.radius, options.fov_y_deg,
                                         options.width, options.height));
    } else if (preset == "eval32") {
        for (int k = 0; k < 32; ++k)
            cams.push_back(Camera::orbit(360.0 * k / 32.0, k % 2 == 0 ? 30.0 : -10.0, options.radius,
                                         options.fov_y_deg, options.width, options.height));
    } else {
        throw InputError("unknown rig preset '" + preset + "' (expected six_view or eval32)");
    }
    return cams;
}

EnvLight gen_env(const std::string& preset, const EnvParams& params) {
    if (params.height < 1) throw PreconditionError("gen_env: height must be >= 1");
    if (!(params.intensity >= 0)) throw PreconditionError("gen_env: intensity must be >= 0");
    EnvLight light;
    light.latlong = Image(2 * params.height, params.height, 3);
    if (preset == "uniform") {
        for (float& v : light.latlong.data()) v = static_cast<float>(params.intensity);
    } else if (preset == "three_point") {
        const double s = params.intensity;
        light.points = {{{3.0, -2.0, 2.5}, Rgb{14.0, 13.5, 13.0} * s},
                        {{-3.0, -1.5, 0.5}, Rgb{5.5, 6.0, 6.5} * s},
                        {{0.5, 3.0, 1.5}, Rgb{8.0, 8.0, 8.0} * s}};
    } else if (preset == "gradient_sky") {
        const Rgb zenith{0.55, 0.75, 1.1}, ground{0.12, 0.10, 0.08};
        for (int y = 0; y < params.height; ++y) {
            double t = (y + 0.5) / params.height;  // 0 at +Z
            Rgb c = lerp(zenith, ground, t) * params.intensity;
            for (int x = 0; x < light.latlong.width(); ++x) light.latlong.set_rgb(x, y, c);
        }
    } else {
        throw InputError("unknown lighting preset '" + preset + "' (expected uniform, three_point or gradient_sky)");
    }
    return light;
}

}  // namespace uvpbr
