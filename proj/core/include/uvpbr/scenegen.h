// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "uvpbr/camera.h"
#include "uvpbr/isosurface.h"
#include "uvpbr/lighting.h"
#include "uvpbr/pbr_textures.h"

namespace uvpbr {

struct ShapeParams {
    double radius = 0.6;                      // sphere
    double half_size = 0.5;                   // cube
    double major_radius = 0.5;                // torus, about +Z
    double minor_radius = 0.2;                // torus
    Vec3 center_a{-0.45, 0, 0};               // union
    Vec3 center_b{0.45, 0, 0};                // union
    double radius_a = 0.35, radius_b = 0.35;  // union
};

/// Signed distance (negative inside) of a named shape: sphere, cube, torus or
/// union. Throws InputError on an unknown name.
double shape_distance(const std::string& shape, const ShapeParams& params, const Vec3& p);

/// Occupancy over [-1, 1]^3: clamp(0.5 - d / h, 0, 1) with h the node spacing,
/// so density crosses 0.5 on the surface over one voxel.
DensityGrid gen_density(const std::string& shape, int resolution, const ShapeParams& params = {});

struct PbrParams {
    Rgb diffuse_a{0.5};
    Rgb diffuse_b{0.9, 0.6, 0.2};
    double roughness = 0.5;
    double metalness = 0.0;
    int period = 8;  // checker cell size in texels
    double roughness_from = 0.1;
    double roughness_to = 1.0;
};

/// Procedural PBR textures over UV space. Patterns: constant (diffuse_a),
/// checker (diffuse_a / diffuse_b), gradient (smooth color and roughness
/// rising along U), two_material (metal rho=0.1 with diffuse_b vs dielectric
/// rho=0.8 with diffuse_a). baked_color mirrors the diffuse plane. Every texel
/// is valid unless `atlas` is given, in which case validity follows it.
PbrTextures gen_pbr(const std::string& pattern, int texel_size, const PbrParams& params = {},
                    const TexelGrid* atlas = nullptr);

struct RigOptions {
    int width = 320;
    int height = 320;
    double radius = 2.7;
    double fov_y_deg = 40.0;
};

/// six_view: azimuths 30..330 step 60, elevations alternating +20/-10.
/// eval32: 32 azimuths, elevations alternating +30/-10.
std::vector<Camera> gen_rig(const std::string& preset, const RigOptions& options = {});

struct EnvParams {
    double intensity = 1.0;
    int height = 32;  // lat-long rows; width is twice this
};

/// uniform: constant radiance; three_point: black environment with key, fill
/// and back point lights; gradient_sky: bright zenith fading to a dark ground.
EnvLight gen_env(const std::string& preset, const EnvParams& params = {});

}  // namespace uvpbr
