// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/raster.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uvpbr/intersect.h"
#include "uvpbr/parallel.h"

namespace uvpbr {

std::size_t GBuffer::covered_count() const {
    std::size_t n = 0;
    for (std::uint8_t c : coverage) n += c;
    return n;
}

GBuffer render_gbuffer(const TriMesh& mesh, const Camera& cam) {
    mesh.validate();
    GBuffer gb;
    gb.width = cam.width();
    gb.height = cam.height();
    std::size_t n = static_cast<std::size_t>(gb.width) * gb.height;
    gb.depth.assign(n, std::numeric_limits<double>::infinity());
    gb.face.assign(n, -1);
    gb.b1.assign(n, 0.0);
    gb.b2.assign(n, 0.0);
    gb.coverage.assign(n, 0);

    // Screen-space pixel bounds per face; faces touching the near plane scan the full image.
    struct PixelBox {
        int x0, y0, x1, y1;
    };
    std::vector<PixelBox> boxes(mesh.faces.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
        bool all_in_front = true;
        for (std::uint32_t v : mesh.faces[f]) {
            auto pr = cam.project(mesh.vertices[v]);
            if (!pr) {
                all_in_front = false;
                break;
            }
            lo_x = std::min(lo_x, pr->px);
            lo_y = std::min(lo_y, pr->py);
            hi_x = std::max(hi_x, pr->px);
            hi_y = std::max(hi_y, pr->py);
        }
        if (!all_in_front) {
            boxes[f] = {0, 0, gb.width - 1, gb.height - 1};
            continue;
        }
        // Pixel centers at i + 0.5 inside [lo, hi], widened by one pixel for rounding.
        boxes[f] = {std::max(0, static_cast<int>(std::floor(lo_x - 0.5)) - 1),
                    std::max(0, static_cast<int>(std::floor(lo_y - 0.5)) - 1),
                    std::min(gb.width - 1, static_cast<int>(std::ceil(hi_x - 0.5)) + 1),
                    std::min(gb.height - 1, static_cast<int>(std::ceil(hi_y - 0.5)) + 1)};
    }

    const int band_rows = 16;
    std::size_t bands = static_cast<std::size_t>((gb.height + band_rows - 1) / band_rows);
    parallel_for(bands, [&](std::size_t band) {
        int row0 = static_cast<int>(band) * band_rows;
        int row1 = std::min(gb.height - 1, row0 + band_rows - 1);
        for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
            const PixelBox& b = boxes[f];
            if (b.x0 > b.x1 || b.y1 < row0 || b.y0 > row1) continue;
            for (int y = std::max(b.y0, row0); y <= std::min(b.y1, row1); ++y)
                for (int x = b.x0; x <= b.x1; ++x) {
                    std::size_t i = gb.index(x, y);
                    Ray r = cam.ray(x + 0.5, y + 0.5);
                    auto h = intersect_triangle(r, mesh, f, 0.0, gb.depth[i]);
                    if (!h) continue;
                    gb.depth[i] = h->t;
                    gb.face[i] = static_cast<std::int32_t>(f);
                    gb.b1[i] = h->b1;
                    gb.b2[i] = h->b2;
                    gb.coverage[i] = 1;
                }
        }
    });
    return gb;
}

}  // namespace uvpbr
