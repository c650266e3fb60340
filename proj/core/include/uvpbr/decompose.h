// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uvpbr/backproject.h"
#include "uvpbr/brdf.h"
#include "uvpbr/lighting.h"
#include "uvpbr/mesh.h"
#include "uvpbr/pbr_textures.h"
#include "uvpbr/relight.h"
#include "uvpbr/texel_grid.h"

namespace uvpbr {

/// Everything known about one texel: the per-view measurements and the
/// incident light at its surface point.
struct TexelObservation {
    std::vector<Rgb> colors;
    std::vector<Vec3> viewdirs;
    std::vector<std::uint8_t> visible;
    Vec3 position;
    Vec3 normal;
    std::vector<LightSample> lights;

    std::size_t visible_count() const;
};

/// Collects the observation of texel `i` from the view sets. Light samples
/// use `setup` with stream = i.
TexelObservation gather_observation(const TexelGrid& attributes, std::span<const ViewMapSet> sets, std::size_t i,
                                    const LightingSetup& setup);

/// Mean squared difference between shaded predictions and observed colors
/// over visible views and the three channels.
double rendering_residual(const TexelObservation& obs, const MaterialSample& mat);

struct DiffuseFit {
    Rgb diffuse;
    /// No visible view carries diffuse signal (every response below 1e-6).
    bool low_confidence = false;
};

/// Least-squares albedo with roughness and metalness held fixed. The
/// prediction is affine in the albedo, so the solve is closed-form. Throws
/// PreconditionError without visible views.
DiffuseFit fit_diffuse_texel(const TexelObservation& obs, double rho, double metalness);

struct LandscapeCell {
    double roughness = 0;
    double metalness = 0;
    Rgb diffuse;
    double residual = 0;
};

/// Grid search cells: roughness 0.05..1.0 step 0.05 times metalness {0, 1},
/// each with its closed-form albedo.
std::vector<LandscapeCell> fit_landscape(const TexelObservation& obs);

struct FitOptions {
    int iterations = 20;
    /// Cells within this residual of the best one count as equally good fits.
    double equivalence_tolerance = 1e-4;
    /// Largest albedo spread among equivalent fits for a confident texel.
    double max_albedo_spread = 0.1;
    /// Largest residual for a confident texel.
    double max_residual = 1e-3;
    /// Largest linearized albedo standard error for a confident texel.
    double max_albedo_stddev = 0.01;
    /// Lower bound on the per-observation noise level used for that error.
    double noise_floor = 0.0;
};

struct TexelFit {
    MaterialSample material;
    double residual = 0;
    /// The landscape has a single basin (every equivalent cell agrees on
    /// metalness, and on albedo within max_albedo_spread), albedo_stddev is
    /// at most max_albedo_stddev, and the residual is small.
    bool confident = false;
    /// Largest per-channel albedo standard error, from the Gauss-Newton
    /// covariance scaled by the residual noise level. Infinite when there are
    /// no more observations than parameters.
    double albedo_stddev = 0;
    std::size_t visible_views = 0;
};

/// Grid search followed by damped Gauss-Newton (Levenberg-Marquardt) on all
/// five parameters with box constraints. Throws PreconditionError without
/// visible views.
TexelFit fit_texel_full(const TexelObservation& obs, const FitOptions& options = {});

struct DecomposeOptions {
    FitOptions fit;
    int env_samples = 64;
    std::uint64_t seed = 0;
    /// Values <= 0 select 1e-3 x the mesh bounding-box diagonal.
    double shadow_bias = 0.0;
    bool shadows = true;
};

struct DecomposeResult {
    PbrTextures pbr;
    /// Planes residual (1) and confidence (1); valid where a fit ran.
    TexelGrid diagnostics;
    std::size_t fitted_texels = 0;
    std::size_t confident_texels = 0;
    /// Per view, mean squared error of render_texels on the final textures
    /// against the observations over texels visible in that view (NaN if none).
    std::vector<double> view_residuals;
};

/// Fits every atlas-valid texel seen by at least one view, then fills
/// low-confidence and unseen texels per parameter plane by pull-push.
/// `attributes` is the rasterized atlas (position, normal, validity) and
/// `mesh` the occluder for point-light shadows.
DecomposeResult decompose_texture(const TexelGrid& fused, std::span<const ViewMapSet> sets,
                                  const TexelGrid& attributes, const TriMesh& mesh, const EnvLight& light,
                                  const DecomposeOptions& options = {});

/// The lighting setup decompose_texture uses, for re-rendering its results.
LightingSetup decompose_lighting(const TriMesh& mesh, const MeshIntersector* occluder, const EnvLight& light,
                                 const DecomposeOptions& options);

}  // namespace uvpbr
