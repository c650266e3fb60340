// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "uvpbr/camera.h"
#include "uvpbr/mesh.h"

namespace uvpbr {

/// Per-pixel visibility buffers sampled at pixel centers.
struct GBuffer {
    int width = 0, height = 0;
    std::vector<double> depth;         // distance along the view ray; +inf when uncovered
    std::vector<std::int32_t> face;    // -1 when uncovered
    std::vector<double> b1, b2;        // barycentrics of face vertices 1 and 2
    std::vector<std::uint8_t> coverage;

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool covered(int x, int y) const { return coverage[index(x, y)] != 0; }
    std::size_t covered_count() const;
};

/// Rasterizes the mesh by casting the pixel-center ray against every face
/// whose projected bounds contain the pixel. The nearest surface wins; equal
/// depths keep the lower face index.
GBuffer render_gbuffer(const TriMesh& mesh, const Camera& cam);

}  // namespace uvpbr
