// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "uvpbr/camera.h"
#include "uvpbr/image.h"
#include "uvpbr/mesh.h"
#include "uvpbr/raster.h"
#include "uvpbr/texel_grid.h"

namespace uvpbr {

/// Per-view measurements in UV space. Planes: color (3), mask (1), position
/// (3), texcoord (2), viewdir (3, surface to camera), normal (3). Valid bits
/// mirror the mask; every channel is zero where the mask is 0.
struct ViewMapSet {
    static constexpr const char* kColor = "color";
    static constexpr const char* kMask = "mask";
    static constexpr const char* kPosition = "position";
    static constexpr const char* kTexcoord = "texcoord";
    static constexpr const char* kViewdir = "viewdir";
    static constexpr const char* kNormal = "normal";

    TexelGrid maps;

    explicit ViewMapSet(int size = 0);
    bool visible(std::size_t texel) const { return maps.valid(texel); }
    bool operator==(const ViewMapSet&) const = default;
};

struct VisibilityOptions {
    /// Absolute depth tolerance; values <= 0 select 1e-3 x the mesh bounding-box diagonal.
    double depth_bias = 0.0;
    /// Minimum n . viewdir for a texel to count as seen.
    double cos_threshold = 0.1;
};

double resolve_depth_bias(const TriMesh& mesh, const VisibilityOptions& options);

/// Back-projects one image onto the texel grid produced by rasterize_attributes.
/// A valid texel is visible when it projects in-frame, no surface lies more
/// than the depth bias in front of it along the exact camera ray, and
/// n . viewdir >= cos_threshold. G-buffer faces around the projection are
/// tested first; survivors are confirmed with a full ray cast.
/// The color is a bilinear image sample restricted to mesh-covered pixels.
/// `mesh` must be the mesh the grid's face_id plane refers to.
ViewMapSet backproject_view(const TexelGrid& grid, const Image& image, const Camera& cam, const GBuffer& gbuffer,
                            const TriMesh& mesh, const VisibilityOptions& options = {});

struct View {
    Image image;  // linear RGB, camera resolution
    Camera camera;
};

struct BackprojectResult {
    std::vector<ViewMapSet> sets;
    std::size_t valid_texels = 0;
    std::size_t seen_texels = 0;  // valid texels visible in at least one view
    double union_coverage() const {
        return valid_texels ? static_cast<double>(seen_texels) / valid_texels : 0.0;
    }
};

/// Renders a G-buffer per view and back-projects every view. Throws
/// PreconditionError when `views` is empty.
BackprojectResult backproject_all(const TexelGrid& grid, const TriMesh& mesh, std::span<const View> views,
                                  const VisibilityOptions& options = {});

}  // namespace uvpbr
