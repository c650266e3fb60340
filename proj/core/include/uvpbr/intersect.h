// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uvpbr/camera.h"
#include "uvpbr/mesh.h"

namespace uvpbr {

struct Hit {
    double t = 0;
    std::uint32_t face = 0;
    double b1 = 0, b2 = 0;  // barycentrics of vertices 1 and 2
};

/// Moller-Trumbore ray/triangle test, two-sided.
std::optional<Hit> intersect_triangle(const Ray& ray, const TriMesh& mesh, std::uint32_t face, double t_min,
                                      double t_max);

/// Nearest hit in (t_min, t_max) over every face; ties go to the lower face index.
std::optional<Hit> brute_force_closest(const TriMesh& mesh, const Ray& ray, double t_min, double t_max);

/// Ray queries against a mesh. Small meshes are scanned exhaustively, larger
/// ones through a uniform grid; both paths return identical hits.
class MeshIntersector {
  public:
    static constexpr std::size_t kDefaultGridThreshold = 512;

    explicit MeshIntersector(const TriMesh& mesh, std::size_t grid_threshold = kDefaultGridThreshold);

    std::optional<Hit> closest(const Ray& ray, double t_min, double t_max) const;
    bool occluded(const Ray& ray, double t_min, double t_max) const;
    bool uses_grid() const { return use_grid_; }
    const TriMesh& mesh() const { return *mesh_; }

  private:
    template <typename Visit>
    void traverse(const Ray& ray, double t_min, double t_max, Visit&& visit) const;

    const TriMesh* mesh_;
    bool use_grid_ = false;
    Bounds3 bounds_;
    int dims_[3] = {1, 1, 1};
    Vec3 cell_size_;
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> cell_faces_;
};

}  // namespace uvpbr
