// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "uvpbr/math.h"
#include "uvpbr/mesh.h"
#include "uvpbr/texel_grid.h"

namespace uvpbr {

/// One atlas chart: a face set flattened by orthographic projection along a
/// signed coordinate axis, then scaled and translated into its rectangle.
struct Chart {
    std::vector<std::uint32_t> faces;  // indices into Atlas::mesh.faces
    int axis = 0;                      // 0..5 = +X, -X, +Y, -Y, +Z, -Z
    Vec2 proj_min;                     // lower corner of the projected extent
    Vec2 proj_extent;                  // size of the projected extent (world units)
    // Texel rectangle including gutters: [rect_x, rect_x + rect_w) x [rect_y, rect_y + rect_h).
    int rect_x = 0, rect_y = 0, rect_w = 0, rect_h = 0;
};

struct Atlas {
    std::vector<Chart> charts;
    int texel_size = 0;
    int gutter = 0;
    double texels_per_unit = 0;  // shared world-to-texel scale
    /// Unwrapped mesh: source faces in original order, vertices split along
    /// chart boundaries, per-vertex UVs in [0, 1]^2.
    TriMesh mesh;
    std::vector<std::uint32_t> face_chart;     // chart of each face
    std::vector<std::uint32_t> source_vertex;  // original vertex of each split vertex

    /// 2D orthographic coordinates of p in the chart's projection plane.
    Vec2 project(std::size_t chart, const Vec3& p) const;
    /// Full chart parameterization: world point -> UV.
    Vec2 world_to_uv(std::size_t chart, const Vec3& p) const;
};

struct UnwrapOptions {
    int gutter = 2;
};

/// Groups faces by the dominant signed axis of their smoothed normal, splits
/// each group into edge-connected components and packs the chart rectangles
/// with a skyline packer at the largest uniform scale that fits. Throws
/// InputError naming the required texture size if even the minimum chart
/// footprint cannot be packed.
Atlas unwrap(const TriMesh& mesh, int texel_size, const UnwrapOptions& options = {});

struct RasterStats {
    /// Texel centers claimed by more than one face.
    std::size_t overlap_texels = 0;
};

/// Rasterizes surface attributes into UV space. Planes: position (3), normal
/// (3), texcoord (2), face_id (1), chart_id (1), mask (1). A texel is valid iff
/// its center lies inside some face's UV triangle (top-left fill rule).
TexelGrid rasterize_attributes(const Atlas& atlas, RasterStats* stats = nullptr);

/// Fills invalid texels within `radius` (Chebyshev) of a valid texel with a
/// copy of the nearest valid texel's channels. Validity bits and the mask plane
/// are unchanged.
TexelGrid dilate_gutters(const TexelGrid& grid, int radius);

/// Valid texels with an invalid texel or a texel of a different chart among
/// their `radius`-neighborhood. Requires a chart_id plane.
std::vector<std::uint8_t> seam_mask(const TexelGrid& grid, int radius = 1);

}  // namespace uvpbr
