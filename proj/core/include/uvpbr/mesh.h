// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "uvpbr/math.h"

namespace uvpbr {

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh. `normals` and `uvs` are either empty or one entry per vertex.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;
    std::vector<Vec2> uvs;
    std::vector<Face> faces;

    bool empty() const { return faces.empty(); }
    bool has_normals() const { return !vertices.empty() && normals.size() == vertices.size(); }
    bool has_uvs() const { return !vertices.empty() && uvs.size() == vertices.size(); }

    Bounds3 bounds() const;
    Vec3 face_normal(std::size_t f) const;  // unit geometric normal (zero if degenerate)
    double face_area(std::size_t f) const;
    double surface_area() const;

    /// Throws PreconditionError on out-of-range indices or attribute size mismatch.
    void validate() const;

    bool operator==(const TriMesh&) const = default;
};

struct VertexNormalResult {
    TriMesh mesh;
    /// Vertices with no incident face of positive area; their normal is +Z.
    std::vector<std::uint32_t> isolated_vertices;
};

/// Area-weighted vertex normals, unit length.
VertexNormalResult vertex_normals(const TriMesh& mesh);

/// Area-uniform surface samples. Deterministic for a fixed seed. Throws on an
/// empty mesh or count < 1.
std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed);

/// Euler characteristic V - E + F counting only vertices referenced by faces.
long euler_characteristic(const TriMesh& mesh);

/// Number of face-connected components (faces sharing a vertex are connected).
std::size_t connected_components(const TriMesh& mesh);

/// Applies x -> t.apply(x) to positions and rotates normals.
TriMesh transformed(const TriMesh& mesh, const Similarity& t);

void write_obj(const std::filesystem::path& path, const TriMesh& mesh);
/// Reads `v`, `vt`, `vn` and `f` records. Polygons are fan-triangulated;
/// corners with distinct attribute index tuples become distinct vertices.
TriMesh read_obj(const std::filesystem::path& path);

}  // namespace uvpbr
