// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "uvpbr/math.h"
#include "uvpbr/mesh.h"

namespace uvpbr {

/// Scalar densities sampled at the corners of a cubic lattice spanning `bounds`.
/// Node (i, j, k) sits at bounds.lo + extent * (i, j, k) / (resolution - 1).
class DensityGrid {
  public:
    DensityGrid(int resolution, Bounds3 bounds);

    int resolution() const { return resolution_; }
    const Bounds3& bounds() const { return bounds_; }
    /// Distance between neighboring nodes along each axis.
    Vec3 spacing() const;

    double& at(int i, int j, int k) { return values_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
    Vec3 node_position(int i, int j, int k) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * resolution_ + j) * resolution_ + i;
    }

    int resolution_;
    Bounds3 bounds_;
    std::vector<double> values_;
};

/// Iso level for occupancy-style densities.
inline constexpr double kDefaultIsoLevel = 0.5;

/// Classic 256-case marching cubes. Vertices are linearly interpolated along
/// crossing edges and shared between neighboring cells; coincident vertices
/// are welded and zero-area triangles dropped. Triangles are wound so their
/// normals point toward decreasing density. The returned mesh carries
/// area-weighted vertex normals. No crossing yields an empty mesh.
TriMesh marching_cubes(const DensityGrid& grid, double iso_level = kDefaultIsoLevel);

/// Writes `<stem>.raw` (float32 little-endian, i fastest) and `<stem>.json`
/// ({resolution, bounds_min, bounds_max, dtype}).
void write_grid(const std::filesystem::path& stem, const DensityGrid& grid);
DensityGrid read_grid(const std::filesystem::path& stem);

}  // namespace uvpbr
