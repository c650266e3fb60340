// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/backproject.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uvpbr/error.h"
#include "uvpbr/intersect.h"
#include "uvpbr/parallel.h"

namespace uvpbr {

ViewMapSet::ViewMapSet(int size) : maps(size) {
    if (size == 0) return;
    maps.add_plane(kColor, 3);
    maps.add_plane(kMask, 1);
    maps.add_plane(kPosition, 3);
    maps.add_plane(kTexcoord, 2);
    maps.add_plane(kViewdir, 3);
    maps.add_plane(kNormal, 3);
}

double resolve_depth_bias(const TriMesh& mesh, const VisibilityOptions& options) {
    return options.depth_bias > 0 ? options.depth_bias : 1e-3 * mesh.bounds().diagonal();
}

namespace {

void require_attribute_planes(const TexelGrid& grid) {
    for (const char* name : {"position", "normal", "texcoord", "face_id"})
        if (!grid.has_plane(name))
            throw PreconditionError(std::string("backproject: texel grid lacks the '") + name + "' plane");
}

// True when a face stored in the G-buffer near the projection occludes the
// point at distance `dist` along `ray`.
bool occluded_near(const GBuffer& gbuffer, const TriMesh& mesh, const Ray& ray, int ix, int iy, double dist,
                   double bias) {
    double t_max = dist - bias;
    if (t_max <= 0) return false;
    for (int dy = -1; dy <= 1; ++dy) {
        int y = iy + dy;
        if (y < 0 || y >= gbuffer.height) continue;
        for (int dx = -1; dx <= 1; ++dx) {
            int x = ix + dx;
            if (x < 0 || x >= gbuffer.width) continue;
            std::int32_t f = gbuffer.face[gbuffer.index(x, y)];
            if (f < 0) continue;
            if (intersect_triangle(ray, mesh, static_cast<std::uint32_t>(f), 0.0, t_max)) return true;
        }
    }
    return false;
}

// Bilinear image lookup that ignores pixels the mesh does not cover, so
// texels on the silhouette do not pick up background.
Rgb sample_covered(const Image& image, const GBuffer& gbuffer, double px, double py) {
    double fx = px - 0.5, fy = py - 0.5;
    int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
    double tx = fx - x0, ty = fy - y0;
    Rgb sum;
    double wsum = 0;
    for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
            int x = std::clamp(x0 + dx, 0, image.width() - 1), y = std::clamp(y0 + dy, 0, image.height() - 1);
            double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty);
            if (w <= 0 || !gbuffer.covered(x, y)) continue;
            sum += image.rgb(x, y) * w;
            wsum += w;
        }
    return wsum > 0 ? sum / wsum : image.sample_bilinear(px, py);
}

}  // namespace

ViewMapSet backproject_view(const TexelGrid& grid, const Image& image, const Camera& cam, const GBuffer& gbuffer,
                            const TriMesh& mesh, const VisibilityOptions& options) {
    require_attribute_planes(grid);
    if (image.width() != cam.width() || image.height() != cam.height())
        throw PreconditionError("backproject: image is " + std::to_string(image.width()) + "x" +
                                std::to_string(image.height()) + " but the camera expects " +
                                std::to_string(cam.width()) + "x" + std::to_string(cam.height()));
    if (gbuffer.width != cam.width() || gbuffer.height != cam.height())
        throw PreconditionError("backproject: G-buffer resolution does not match the camera");

    const double bias = resolve_depth_bias(mesh, options);
    const Vec3 center = cam.center();
    const MeshIntersector intersector(mesh);
    ViewMapSet out(grid.size());
    TexelGrid& maps = out.maps;
    const int size = grid.size();

    parallel_for(static_cast<std::size_t>(size), [&](std::size_t row) {
        for (int x = 0; x < size; ++x) {
            std::size_t i = grid.index(x, static_cast<int>(row));
            if (!grid.valid(i)) continue;
            Vec3 p = grid.rgb("position", i);
            Vec3 n = normalize(grid.rgb("normal", i));
            auto proj = cam.project(p);
            if (!proj) continue;
            if (proj->px < 0 || proj->py < 0 || proj->px >= cam.width() || proj->py >= cam.height()) continue;
            Vec3 to_cam = center - p;
            double dist = length(to_cam);
            if (dist <= 0) continue;
            Vec3 viewdir = to_cam / dist;
            if (dot(n, viewdir) < options.cos_threshold) continue;
            Ray ray{center, -viewdir};
            int ix = static_cast<int>(proj->px), iy = static_cast<int>(proj->py);
            // The G-buffer faces reject most hidden texels cheaply; occluders
            // thinner than a pixel need the full ray cast.
            if (occluded_near(gbuffer, mesh, ray, ix, iy, dist, bias)) continue;
            if (dist - bias > 0 && intersector.occluded(ray, 0.0, dist - bias)) continue;

            maps.set_valid(i, true);
            maps.set_rgb(ViewMapSet::kColor, i, sample_covered(image, gbuffer, proj->px, proj->py));
            maps.set_scalar(ViewMapSet::kMask, i, 1.0);
            maps.set_rgb(ViewMapSet::kPosition, i, p);
            const Image& tc = grid.plane("texcoord");
            Image& tc_out = maps.plane(ViewMapSet::kTexcoord);
            tc_out.at(x, static_cast<int>(row), 0) = tc.at(x, static_cast<int>(row), 0);
            tc_out.at(x, static_cast<int>(row), 1) = tc.at(x, static_cast<int>(row), 1);
            maps.set_rgb(ViewMapSet::kViewdir, i, viewdir);
            maps.set_rgb(ViewMapSet::kNormal, i, n);
        }
    });
    return out;
}

BackprojectResult backproject_all(const TexelGrid& grid, const TriMesh& mesh, std::span<const View> views,
                                  const VisibilityOptions& options) {
    if (views.empty()) throw PreconditionError("backproject: at least one view is required");
    BackprojectResult result;
    result.sets.reserve(views.size());
    for (const View& view : views) {
        GBuffer gbuffer = render_gbuffer(mesh, view.camera);
        result.sets.push_back(backproject_view(grid, view.image, view.camera, gbuffer, mesh, options));
    }
    for (std::size_t i = 0; i < grid.texel_count(); ++i) {
        if (!grid.valid(i)) continue;
        ++result.valid_texels;
        for (const ViewMapSet& set : result.sets)
            if (set.visible(i)) {
                ++result.seen_texels;
                break;
            }
    }
    return result;
}

}  // namespace uvpbr
