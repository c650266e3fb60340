// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uvpbr/backproject.h"
#include "uvpbr/brdf.h"
#include "uvpbr/camera.h"
#include "uvpbr/image.h"
#include "uvpbr/intersect.h"
#include "uvpbr/lighting.h"
#include "uvpbr/mesh.h"
#include "uvpbr/pbr_textures.h"

namespace uvpbr {

/// One incident-light term at a surface point: outgoing radiance is
/// sum(f_r(l, v) * weight). The weight already carries (n . l), falloff,
/// shadowing and the Monte-Carlo pdf.
struct LightSample {
    Vec3 direction;
    Rgb weight;
};

struct LightingSetup {
    const EnvLight* light = nullptr;
    /// Shadow-ray occluder for point lights; null disables shadows.
    const MeshIntersector* occluder = nullptr;
    /// Cosine-weighted environment samples per shading point.
    int env_samples = 64;
    std::uint64_t seed = 0;
    /// Offset of shadow-ray origins along the normal (world units).
    double shadow_bias = 1e-3;
};

/// Gathers the light samples seen from surface point p with unit normal n.
/// Random numbers come from a stream keyed by (setup.seed, stream), so the
/// result does not depend on evaluation order.
std::vector<LightSample> gather_light_samples(const LightingSetup& setup, const Vec3& p, const Vec3& n,
                                              std::uint64_t stream);

/// Outgoing radiance toward unit direction v.
Rgb shade(std::span<const LightSample> samples, const Vec3& n, const Vec3& v, const MaterialSample& mat);

struct RenderOptions {
    int spp = 64;
    std::uint64_t seed = 0;
    /// Shadow-ray offset; values <= 0 select 1e-3 x the mesh bounding-box diagonal.
    double shadow_bias = 0.0;
    bool shadows = true;
};

struct RenderResult {
    Image color;                        // linear RGB; uncovered pixels are 0
    std::vector<std::uint8_t> coverage;  // 1 where the mesh covers the pixel center
};

/// Direct-lighting render: point lights with ray-cast shadows plus a
/// cosine-sampled, unshadowed environment term. Materials are fetched
/// bilinearly from `pbr` at the interpolated UV.
RenderResult render_pbr(const TriMesh& mesh, const PbrTextures& pbr, const Camera& cam, const EnvLight& light,
                        const RenderOptions& options = {});

/// Emission-only render that shows a texture plane as-is.
RenderResult render_unlit(const TriMesh& mesh, const TexelGrid& texture, const std::string& plane,
                          const Camera& cam);

/// Shades every texel visible in `view` with its own material, position and
/// normal, as seen along the view's viewdir. Result plane: color (3); valid
/// bits follow the view. Uses stream = texel index, matching decomposition.
TexelGrid render_texels(const TexelGrid& attributes, const PbrTextures& pbr, const ViewMapSet& view,
                        const LightingSetup& setup);

}  // namespace uvpbr
