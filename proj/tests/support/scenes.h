// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

// Small scene builders shared by the unit and acceptance tests.

#pragma once

#include <functional>
#include <string>

#include "uvpbr/atlas.h"
#include "uvpbr/isosurface.h"
#include "uvpbr/mesh.h"
#include "uvpbr/scenegen.h"

namespace uvpbr::testing {

/// Marching-cubes surface of a named scenegen shape.
inline TriMesh shape_mesh(const std::string& shape, int resolution, const ShapeParams& params = {}) {
    return marching_cubes(gen_density(shape, resolution, params));
}

/// Marching-cubes surface of an arbitrary signed distance over [-1, 1]^3.
inline TriMesh sdf_mesh(const std::function<double(const Vec3&)>& sdf, int resolution) {
    DensityGrid grid(resolution, Bounds3{{-1, -1, -1}, {1, 1, 1}});
    const double h = grid.spacing().x;
    for (int k = 0; k < resolution; ++k)
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i)
                grid.at(i, j, k) = std::clamp(0.5 - sdf(grid.node_position(i, j, k)) / h, 0.0, 1.0);
    return marching_cubes(grid);
}

/// Three unequal, non-collinear spheres: no rotational symmetry.
inline TriMesh asymmetric_mesh(int resolution) {
    return sdf_mesh(
        [](const Vec3& p) {
            double a = length(p - Vec3{-0.35, 0.10, 0.00}) - 0.42;
            double b = length(p - Vec3{0.40, -0.15, 0.10}) - 0.30;
            double c = length(p - Vec3{0.05, 0.50, -0.20}) - 0.22;
            return std::min({a, b, c});
        },
        resolution);
}

struct AtlasScene {
    Atlas atlas;
    TexelGrid attributes;
};

inline AtlasScene atlas_scene(const TriMesh& mesh, int texel_size) {
    AtlasScene s{unwrap(mesh, texel_size), {}};
    s.attributes = rasterize_attributes(s.atlas);
    return s;
}

}  // namespace uvpbr::testing
