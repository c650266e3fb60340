// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/intersect.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uvpbr {

std::optional<Hit> intersect_triangle(const Ray& ray, const TriMesh& mesh, std::uint32_t face, double t_min,
                                      double t_max) {
    const Face& f = mesh.faces[face];
    const Vec3& p0 = mesh.vertices[f[0]];
    Vec3 e1 = mesh.vertices[f[1]] - p0, e2 = mesh.vertices[f[2]] - p0;
    Vec3 pv = cross(ray.dir, e2);
    double det = dot(e1, pv);
    if (det == 0.0) return std::nullopt;
    double inv = 1.0 / det;
    Vec3 tv = ray.origin - p0;
    double u = dot(tv, pv) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    Vec3 qv = cross(tv, e1);
    double v = dot(ray.dir, qv) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    double t = dot(e2, qv) * inv;
    if (!(t > t_min && t < t_max)) return std::nullopt;
    return Hit{t, face, u, v};
}

std::optional<Hit> brute_force_closest(const TriMesh& mesh, const Ray& ray, double t_min, double t_max) {
    std::optional<Hit> best;
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        auto h = intersect_triangle(ray, mesh, f, t_min, best ? best->t : t_max);
        if (h) best = h;
    }
    return best;
}

MeshIntersector::MeshIntersector(const TriMesh& mesh, std::size_t grid_threshold) : mesh_(&mesh) {
    use_grid_ = mesh.faces.size() > grid_threshold;
    if (!use_grid_) return;
    bounds_ = mesh.bounds();
    Vec3 ext = bounds_.extent();
    double pad = 1e-6 * std::max(bounds_.diagonal(), 1e-12);
    bounds_.lo -= Vec3(pad);
    bounds_.hi += Vec3(pad);
    ext = bounds_.extent();
    // Roughly two faces per cell along the longest axis.
    double cells = 2.0 * std::cbrt(static_cast<double>(mesh.faces.size()));
    double max_ext = max_component(ext);
    for (int a = 0; a < 3; ++a) dims_[a] = std::clamp(static_cast<int>(std::ceil(cells * ext[a] / max_ext)), 1, 256);
    cell_size_ = {ext.x / dims_[0], ext.y / dims_[1], ext.z / dims_[2]};

    auto cell_of = [&](double v, int a) {
        return std::clamp(static_cast<int>((v - bounds_.lo[a]) / cell_size_[a]), 0, dims_[a] - 1);
    };
    std::size_t ncell = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    std::vector<std::uint32_t> counts(ncell + 1, 0);
    auto for_cells = [&](std::uint32_t f, auto&& fn) {
        Bounds3 b;
        for (std::uint32_t v : mesh.faces[f]) b.extend(mesh.vertices[v]);
        int lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = cell_of(b.lo[a], a);
            hi[a] = cell_of(b.hi[a], a);
        }
        for (int z = lo[2]; z <= hi[2]; ++z)
            for (int y = lo[1]; y <= hi[1]; ++y)
                for (int x = lo[0]; x <= hi[0]; ++x)
                    fn((static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x);
    };
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) for_cells(f, [&](std::size_t c) { ++counts[c + 1]; });
    for (std::size_t c = 0; c < ncell; ++c) counts[c + 1] += counts[c];
    cell_start_ = counts;
    cell_faces_.resize(counts[ncell]);
    std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f)
        for_cells(f, [&](std::size_t c) { cell_faces_[fill[c]++] = f; });
}

template <typename Visit>
void MeshIntersector::traverse(const Ray& ray, double t_min, double t_max, Visit&& visit) const {
    // Clip the ray to the grid bounds.
    double t0 = t_min, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double d = ray.dir[a];
        if (d == 0.0) {
            if (ray.origin[a] < bounds_.lo[a] || ray.origin[a] > bounds_.hi[a]) return;
            continue;
        }
        double ta = (bounds_.lo[a] - ray.origin[a]) / d, tb = (bounds_.hi[a] - ray.origin[a]) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return;
    Vec3 p = ray.origin + ray.dir * t0;
    int cell[3], step[3];
    double t_next[3], t_delta[3];
    for (int a = 0; a < 3; ++a) {
        cell[a] = std::clamp(static_cast<int>((p[a] - bounds_.lo[a]) / cell_size_[a]), 0, dims_[a] - 1);
        double d = ray.dir[a];
        if (d > 0) {
            step[a] = 1;
            t_next[a] = (bounds_.lo[a] + (cell[a] + 1) * cell_size_[a] - ray.origin[a]) / d;
            t_delta[a] = cell_size_[a] / d;
        } else if (d < 0) {
            step[a] = -1;
            t_next[a] = (bounds_.lo[a] + cell[a] * cell_size_[a] - ray.origin[a]) / d;
            t_delta[a] = -cell_size_[a] / d;
        } else {
            step[a] = 0;
            t_next[a] = std::numeric_limits<double>::infinity();
            t_delta[a] = std::numeric_limits<double>::infinity();
        }
    }
    while (true) {
        std::size_t c = (static_cast<std::size_t>(cell[2]) * dims_[1] + cell[1]) * dims_[0] + cell[0];
        int a = t_next[0] < t_next[1] ? (t_next[0] < t_next[2] ? 0 : 2) : (t_next[1] < t_next[2] ? 1 : 2);
        double cell_exit = t_next[a];
        if (visit(std::span<const std::uint32_t>(cell_faces_.data() + cell_start_[c], cell_start_[c + 1] - cell_start_[c]),
                  cell_exit))
            return;
        if (cell_exit > t1) return;
        cell[a] += step[a];
        if (cell[a] < 0 || cell[a] >= dims_[a]) return;
        t_next[a] += t_delta[a];
    }
}

std::optional<Hit> MeshIntersector::closest(const Ray& ray, double t_min, double t_max) const {
    if (!use_grid_) return brute_force_closest(*mesh_, ray, t_min, t_max);
    std::optional<Hit> best;
    traverse(ray, t_min, t_max, [&](std::span<const std::uint32_t> faces, double cell_exit) {
        for (std::uint32_t f : faces) {
            // Test against t_max (not best->t) so equal-t ties resolve by face index.
            auto h = intersect_triangle(ray, *mesh_, f, t_min, best ? std::nextafter(best->t, 1e300) : t_max);
            if (h && (!best || h->t < best->t || (h->t == best->t && h->face < best->face))) best = h;
        }
        return best && best->t <= cell_exit;
    });
    return best;
}

bool MeshIntersector::occluded(const Ray& ray, double t_min, double t_max) const {
    if (!use_grid_) {
        for (std::uint32_t f = 0; f < mesh_->faces.size(); ++f)
            if (intersect_triangle(ray, *mesh_, f, t_min, t_max)) return true;
        return false;
    }
    bool hit = false;
    traverse(ray, t_min, t_max, [&](std::span<const std::uint32_t> faces, double) {
        for (std::uint32_t f : faces)
            if (intersect_triangle(ray, *mesh_, f, t_min, t_max)) {
                hit = true;
                break;
            }
        return hit;
    });
    return hit;
}

}  // namespace uvpbr
