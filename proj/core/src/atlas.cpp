// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/atlas.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "uvpbr/error.h"
#include "uvpbr/parallel.h"

namespace uvpbr {

namespace {

// Signed axis directions in chart axis order.
constexpr Vec3 kAxisDir[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

int dominant_axis(const Vec3& n) {
    int best = 0;
    double best_v = -1;
    for (int a = 0; a < 6; ++a) {
        double v = dot(n, kAxisDir[a]);
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

// Orientation-preserving projection: (t, b) with t x b = axis direction.
Vec2 project_axis(int axis, const Vec3& p) {
    switch (axis) {
        case 0: return {p.y, p.z};
        case 1: return {p.z, p.y};
        case 2: return {p.z, p.x};
        case 3: return {p.x, p.z};
        case 4: return {p.x, p.y};
        default: return {p.y, p.x};
    }
}

struct Rect {
    int w = 0, h = 0;
    int x = 0, y = 0;
};

// Bottom-left skyline packer. Returns false if some rectangle does not fit.
bool skyline_pack(std::vector<Rect>& rects, const std::vector<std::size_t>& order, int size) {
    struct Segment {
        int x, y, w;
    };
    std::vector<Segment> sky{{0, 0, size}};
    for (std::size_t idx : order) {
        Rect& r = rects[idx];
        if (r.w > size || r.h > size) return false;
        int best_y = size + 1, best_x = 0;
        std::size_t best_seg = 0;
        for (std::size_t s = 0; s < sky.size(); ++s) {
            int x = sky[s].x;
            if (x + r.w > size) break;
            int y = 0, remaining = r.w;
            for (std::size_t t = s; t < sky.size() && remaining > 0; ++t) {
                y = std::max(y, sky[t].y);
                remaining -= sky[t].w;
            }
            if (y + r.h <= size && (y < best_y || (y == best_y && x < best_x))) {
                best_y = y;
                best_x = x;
                best_seg = s;
            }
        }
        if (best_y > size) return false;
        r.x = best_x;
        r.y = best_y;
        // Replace the covered skyline span with the new top edge.
        Segment top{best_x, best_y + r.h, r.w};
        int end = best_x + r.w;
        std::vector<Segment> next(sky.begin(), sky.begin() + static_cast<long>(best_seg));
        next.push_back(top);
        for (std::size_t t = best_seg; t < sky.size(); ++t) {
            int seg_end = sky[t].x + sky[t].w;
            if (seg_end <= end) continue;
            Segment rest = sky[t];
            if (rest.x < end) {
                rest.w = seg_end - end;
                rest.x = end;
            }
            next.push_back(rest);
        }
        // Merge neighbors at equal height.
        sky.clear();
        for (const Segment& s : next) {
            if (!sky.empty() && sky.back().y == s.y)
                sky.back().w += s.w;
            else
                sky.push_back(s);
        }
    }
    return true;
}

struct PackResult {
    std::vector<Rect> rects;
    bool ok = false;
};

PackResult pack_at_scale(const std::vector<Vec2>& extents, double scale, int gutter, int size) {
    PackResult res;
    res.rects.resize(extents.size());
    for (std::size_t c = 0; c < extents.size(); ++c) {
        res.rects[c].w = std::max(1, static_cast<int>(std::ceil(extents[c].x * scale))) + 2 * gutter;
        res.rects[c].h = std::max(1, static_cast<int>(std::ceil(extents[c].y * scale))) + 2 * gutter;
    }
    std::vector<std::size_t> order(extents.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (res.rects[a].h != res.rects[b].h) return res.rects[a].h > res.rects[b].h;
        return res.rects[a].w > res.rects[b].w;
    });
    res.ok = skyline_pack(res.rects, order, size);
    return res;
}

}  // namespace

Vec2 Atlas::project(std::size_t chart, const Vec3& p) const { return project_axis(charts[chart].axis, p); }

Vec2 Atlas::world_to_uv(std::size_t chart, const Vec3& p) const {
    const Chart& c = charts[chart];
    Vec2 q = project_axis(c.axis, p) - c.proj_min;
    double inv = 1.0 / texel_size;
    return {(c.rect_x + gutter + q.x * texels_per_unit) * inv, (c.rect_y + gutter + q.y * texels_per_unit) * inv};
}

Atlas unwrap(const TriMesh& mesh, int texel_size, const UnwrapOptions& options) {
    mesh.validate();
    if (mesh.empty()) throw PreconditionError("unwrap: mesh has no faces");
    if (texel_size < 1) throw InputError("unwrap: texel_size must be positive");
    if (options.gutter < 0) throw InputError("unwrap: gutter must be non-negative");
    const std::size_t nf = mesh.faces.size();

    // Bin faces by the dominant axis of their smoothed normal, falling back to
    // the facet normal when the smoothed bin would flip the projected triangle.
    std::vector<Vec3> smooth = mesh.has_normals() ? mesh.normals : vertex_normals(mesh).mesh.normals;
    std::vector<int> bin(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const Face& t = mesh.faces[f];
        Vec3 facet = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        int axis = dominant_axis(smooth[t[0]] + smooth[t[1]] + smooth[t[2]]);
        double facet_len = length(facet);
        if (!(dot(facet, kAxisDir[axis]) > 1e-3 * facet_len)) axis = dominant_axis(facet);
        bin[f] = axis;
    }

    // Edge-connected components within each bin.
    std::vector<std::uint32_t> parent(nf);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> edge_face;
    for (std::uint32_t f = 0; f < nf; ++f) {
        const Face& t = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = t[k], b = t[(k + 1) % 3];
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto [it, inserted] = edge_face.try_emplace(key, f);
            if (!inserted && bin[it->second] == bin[f]) {
                std::uint32_t ra = find(it->second), rb = find(f);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }

    Atlas atlas;
    atlas.texel_size = texel_size;
    atlas.gutter = options.gutter;
    atlas.face_chart.assign(nf, 0);
    std::map<std::uint32_t, std::uint32_t> root_chart;  // ordered by smallest face index
    for (std::uint32_t f = 0; f < nf; ++f) {
        std::uint32_t r = find(f);
        auto [it, inserted] = root_chart.try_emplace(r, static_cast<std::uint32_t>(atlas.charts.size()));
        if (inserted) {
            atlas.charts.emplace_back();
            atlas.charts.back().axis = bin[f];
        }
        atlas.charts[it->second].faces.push_back(f);
        atlas.face_chart[f] = it->second;
    }

    std::vector<Vec2> extents(atlas.charts.size());
    for (Chart& c : atlas.charts) {
        Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
        for (std::uint32_t f : c.faces)
            for (std::uint32_t v : mesh.faces[f]) {
                Vec2 q = project_axis(c.axis, mesh.vertices[v]);
                lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
                hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
            }
        c.proj_min = lo;
        c.proj_extent = hi - lo;
    }
    for (std::size_t c = 0; c < extents.size(); ++c) extents[c] = atlas.charts[c].proj_extent;

    // Largest scale that packs. Minimum footprint is one texel plus gutters.
    const int g = options.gutter;
    PackResult tiny = pack_at_scale(extents, 0.0, g, texel_size);
    if (!tiny.ok) {
        int required = texel_size;
        while (!pack_at_scale(extents, 0.0, g, required).ok) required = required * 5 / 4 + 1;
        int lo_size = texel_size, hi_size = required;
        while (lo_size + 1 < hi_size) {
            int mid = (lo_size + hi_size) / 2;
            (pack_at_scale(extents, 0.0, g, mid).ok ? hi_size : lo_size) = mid;
        }
        throw InputError("unwrap: texel_size " + std::to_string(texel_size) + " is too small to pack " +
                         std::to_string(extents.size()) + " charts; required size is at least " +
                         std::to_string(hi_size));
    }
    double max_extent = 0, area = 0;
    for (const Vec2& e : extents) {
        max_extent = std::max({max_extent, e.x, e.y});
        area += e.x * e.y;
    }
    double hi_scale = max_extent > 0 ? texel_size / max_extent : 1.0;
    if (area > 0) hi_scale = std::min(hi_scale, texel_size / std::sqrt(area));
    double lo_scale = 0;
    PackResult best = tiny;
    PackResult at_hi = pack_at_scale(extents, hi_scale, g, texel_size);
    if (at_hi.ok) {
        lo_scale = hi_scale;
        best = at_hi;
    } else {
        for (int it = 0; it < 48; ++it) {
            double mid = 0.5 * (lo_scale + hi_scale);
            PackResult r = pack_at_scale(extents, mid, g, texel_size);
            if (r.ok) {
                lo_scale = mid;
                best = std::move(r);
            } else {
                hi_scale = mid;
            }
        }
    }
    atlas.texels_per_unit = lo_scale;
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        atlas.charts[c].rect_x = best.rects[c].x;
        atlas.charts[c].rect_y = best.rects[c].y;
        atlas.charts[c].rect_w = best.rects[c].w;
        atlas.charts[c].rect_h = best.rects[c].h;
    }

    // Split vertices per chart and assign UVs.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> split;  // (chart, vertex) -> new index
    atlas.mesh.faces.resize(nf);
    for (std::uint32_t f = 0; f < nf; ++f) {
        std::uint32_t c = atlas.face_chart[f];
        for (int k = 0; k < 3; ++k) {
            std::uint32_t v = mesh.faces[f][k];
            auto [it, inserted] = split.try_emplace({c, v}, static_cast<std::uint32_t>(atlas.mesh.vertices.size()));
            if (inserted) {
                atlas.mesh.vertices.push_back(mesh.vertices[v]);
                if (mesh.has_normals()) atlas.mesh.normals.push_back(mesh.normals[v]);
                atlas.mesh.uvs.push_back(atlas.world_to_uv(c, mesh.vertices[v]));
                atlas.source_vertex.push_back(v);
            }
            atlas.mesh.faces[f][k] = it->second;
        }
    }
    return atlas;
}

namespace {

// Edge function of (a, b) evaluated at p; positive on the left.
double edge_fn(const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// Top-left rule for counter-clockwise triangles in a y-up frame. A shared
// edge is walked in opposite directions by its two faces, so exactly one owns it.
bool owns_edge(const Vec2& a, const Vec2& b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    return dy < 0 || (dy == 0 && dx < 0);
}

}  // namespace

TexelGrid rasterize_attributes(const Atlas& atlas, RasterStats* stats) {
    const TriMesh& mesh = atlas.mesh;
    const int size = atlas.texel_size;
    TexelGrid grid(size);
    grid.add_plane("position", 3);
    grid.add_plane("normal", 3);
    grid.add_plane("texcoord", 2);
    grid.add_plane("face_id", 1);
    grid.add_plane("chart_id", 1);
    grid.add_plane("mask", 1);
    std::size_t overlaps = 0;
    std::vector<std::int64_t> owner(grid.texel_count(), -1);

    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& t = mesh.faces[f];
        Vec2 p[3];
        for (int k = 0; k < 3; ++k) p[k] = mesh.uvs[t[k]] * static_cast<double>(size);
        double area2 = edge_fn(p[0], p[1], p[2]);
        if (area2 == 0) continue;
        int order[3] = {0, 1, 2};
        if (area2 < 0) std::swap(order[1], order[2]);
        Vec2 a = p[order[0]], b = p[order[1]], c = p[order[2]];
        double inv_area = 1.0 / std::abs(area2);
        int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
        int x1 = std::min(size - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}) - 0.5)));
        int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
        int y1 = std::min(size - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}) - 0.5)));
        Vec3 face_n = mesh.face_normal(f);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                Vec2 q{x + 0.5, y + 0.5};
                double w0 = edge_fn(b, c, q), w1 = edge_fn(c, a, q), w2 = edge_fn(a, b, q);
                if (w0 < 0 || w1 < 0 || w2 < 0) continue;
                if ((w0 == 0 && !owns_edge(b, c)) || (w1 == 0 && !owns_edge(c, a)) ||
                    (w2 == 0 && !owns_edge(a, b)))
                    continue;
                std::size_t i = grid.index(x, y);
                if (owner[i] >= 0) {
                    ++overlaps;
                    continue;
                }
                owner[i] = static_cast<std::int64_t>(f);
                double bary[3];
                bary[order[0]] = w0 * inv_area;
                bary[order[1]] = w1 * inv_area;
                bary[order[2]] = w2 * inv_area;
                Vec3 pos, nrm;
                for (int k = 0; k < 3; ++k) {
                    pos += mesh.vertices[t[k]] * bary[k];
                    if (mesh.has_normals()) nrm += mesh.normals[t[k]] * bary[k];
                }
                nrm = mesh.has_normals() ? normalize(nrm) : face_n;
                if (length(nrm) == 0) nrm = face_n;
                grid.set_valid(i, true);
                grid.set_rgb("position", i, pos);
                grid.set_rgb("normal", i, nrm);
                Vec2 uv = grid.texel_center(x, y);
                grid.plane("texcoord").at(x, y, 0) = static_cast<float>(uv.x);
                grid.plane("texcoord").at(x, y, 1) = static_cast<float>(uv.y);
                grid.set_scalar("face_id", i, static_cast<double>(f));
                grid.set_scalar("chart_id", i, static_cast<double>(atlas.face_chart[f]));
                grid.set_scalar("mask", i, 1.0);
            }
    }
    if (stats) stats->overlap_texels = overlaps;
    return grid;
}

TexelGrid dilate_gutters(const TexelGrid& grid, int radius) {
    if (radius < 0) throw PreconditionError("dilate_gutters: radius must be >= 0");
    TexelGrid out = grid;
    if (radius == 0) return out;
    const int size = grid.size();
    std::vector<std::int64_t> source(grid.texel_count(), -1);
    parallel_for(static_cast<std::size_t>(size), [&](std::size_t yy) {
        int y = static_cast<int>(yy);
        for (int x = 0; x < size; ++x) {
            if (grid.valid(grid.index(x, y))) continue;
            std::int64_t best = -1;
            int best_d2 = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                int sy = y + dy;
                if (sy < 0 || sy >= size) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    int sx = x + dx;
                    if (sx < 0 || sx >= size) continue;
                    std::size_t j = grid.index(sx, sy);
                    if (!grid.valid(j)) continue;
                    int d2 = dx * dx + dy * dy;
                    if (best < 0 || d2 < best_d2) {
                        best = static_cast<std::int64_t>(j);
                        best_d2 = d2;
                    }
                }
            }
            source[grid.index(x, y)] = best;
        }
    });
    for (const std::string& name : grid.plane_names()) {
        if (name == "mask") continue;
        const Image& src = grid.plane(name);
        Image& dst = out.plane(name);
        for (std::size_t i = 0; i < source.size(); ++i) {
            if (source[i] < 0) continue;
            int x = static_cast<int>(i % size), y = static_cast<int>(i / size);
            int sx = static_cast<int>(source[i] % size), sy = static_cast<int>(source[i] / size);
            for (int c = 0; c < src.channels(); ++c) dst.at(x, y, c) = src.at(sx, sy, c);
        }
    }
    return out;
}

std::vector<std::uint8_t> seam_mask(const TexelGrid& grid, int radius) {
    const int size = grid.size();
    std::vector<std::uint8_t> seam(grid.texel_count(), 0);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            std::size_t i = grid.index(x, y);
            if (!grid.valid(i)) continue;
            double chart = grid.scalar("chart_id", i);
            bool is_seam = false;
            for (int dy = -radius; dy <= radius && !is_seam; ++dy)
                for (int dx = -radius; dx <= radius && !is_seam; ++dx) {
                    int sx = x + dx, sy = y + dy;
                    if (sx < 0 || sy < 0 || sx >= size || sy >= size) {
                        is_seam = true;
                        continue;
                    }
                    std::size_t j = grid.index(sx, sy);
                    is_seam = !grid.valid(j) || grid.scalar("chart_id", j) != chart;
                }
            seam[i] = is_seam ? 1 : 0;
        }
    return seam;
}

}  // namespace uvpbr
