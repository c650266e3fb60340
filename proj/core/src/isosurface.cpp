// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/isosurface.h"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "uvpbr/error.h"

namespace uvpbr {

namespace {

#include "mc_tables.inc"

// Corner offsets in table order.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                     {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

DensityGrid::DensityGrid(int resolution, Bounds3 bounds) : resolution_(resolution), bounds_(bounds) {
    if (resolution < 2) throw PreconditionError("density grid: resolution must be >= 2");
    Vec3 e = bounds.extent();
    if (bounds.empty() || !(e.x > 0 && e.y > 0 && e.z > 0))
        throw PreconditionError("density grid: bounds are degenerate");
    values_.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0.0);
}

Vec3 DensityGrid::spacing() const { return bounds_.extent() / static_cast<double>(resolution_ - 1); }

Vec3 DensityGrid::node_position(int i, int j, int k) const {
    Vec3 e = bounds_.extent();
    double s = 1.0 / (resolution_ - 1);
    return {bounds_.lo.x + e.x * (i * s), bounds_.lo.y + e.y * (j * s), bounds_.lo.z + e.z * (k * s)};
}

TriMesh marching_cubes(const DensityGrid& grid, double iso_level) {
    for (double v : grid.values())
        if (!std::isfinite(v)) throw PreconditionError("marching_cubes: grid contains non-finite values");
    const int n = grid.resolution();
    TriMesh raw;
    // Edge key: lower node index * 3 + axis. Vertices are created in cell scan
    // order, which fixes the output ordering.
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
    auto node_key = [n](int i, int j, int k) {
        return (static_cast<std::uint64_t>(k) * n + j) * n + i;
    };

    for (int k = 0; k + 1 < n; ++k)
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                std::array<double, 8> val;
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    val[c] = grid.at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]);
                    if (val[c] < iso_level) cube |= 1 << c;
                }
                if (kEdgeTable[cube] == 0) continue;
                std::array<std::uint32_t, 12> ids{};
                for (int e = 0; e < 12; ++e) {
                    if (!(kEdgeTable[cube] & (1 << e))) continue;
                    int a = kEdgeCorners[e][0], b = kEdgeCorners[e][1];
                    // Orient the edge from its lower lattice node so shared
                    // edges interpolate identically from every cell.
                    auto lower = [&](int c) {
                        return kCorner[c][0] + kCorner[c][1] + kCorner[c][2];
                    };
                    if (lower(a) > lower(b)) std::swap(a, b);
                    int ai = i + kCorner[a][0], aj = j + kCorner[a][1], ak = k + kCorner[a][2];
                    int axis = kCorner[b][0] != kCorner[a][0] ? 0 : (kCorner[b][1] != kCorner[a][1] ? 1 : 2);
                    std::uint64_t key = node_key(ai, aj, ak) * 3 + axis;
                    auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<std::uint32_t>(raw.vertices.size()));
                    if (inserted) {
                        double t = (iso_level - val[a]) / (val[b] - val[a]);
                        Vec3 pa = grid.node_position(ai, aj, ak);
                        Vec3 pb = grid.node_position(i + kCorner[b][0], j + kCorner[b][1], k + kCorner[b][2]);
                        raw.vertices.push_back(pa + (pb - pa) * t);
                    }
                    ids[e] = it->second;
                }
                for (int t = 0; kTriTable[cube][t] != -1; t += 3)
                    raw.faces.push_back({ids[kTriTable[cube][t]], ids[kTriTable[cube][t + 1]],
                                         ids[kTriTable[cube][t + 2]]});
            }

    // Weld bit-identical positions (edges meeting at a node lying exactly on
    // the iso level) and drop triangles that collapse.
    TriMesh mesh;
    std::map<std::array<std::uint64_t, 3>, std::uint32_t> welded;
    std::vector<std::uint32_t> remap(raw.vertices.size());
    std::vector<Vec3> positions;
    for (std::size_t v = 0; v < raw.vertices.size(); ++v) {
        const Vec3& p = raw.vertices[v];
        std::array<std::uint64_t, 3> key{std::bit_cast<std::uint64_t>(p.x + 0.0), std::bit_cast<std::uint64_t>(p.y + 0.0),
                                         std::bit_cast<std::uint64_t>(p.z + 0.0)};
        auto [it, inserted] = welded.try_emplace(key, static_cast<std::uint32_t>(positions.size()));
        if (inserted) positions.push_back(p);
        remap[v] = it->second;
    }
    std::vector<Face> faces;
    for (const Face& f : raw.faces) {
        Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
        if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
        Vec3 c = cross(positions[g[1]] - positions[g[0]], positions[g[2]] - positions[g[0]]);
        if (dot(c, c) == 0.0) continue;
        faces.push_back(g);
    }
    // Compact to referenced vertices, preserving first-reference order.
    std::vector<std::int64_t> compact(positions.size(), -1);
    for (Face& f : faces)
        for (std::uint32_t& idx : f) {
            if (compact[idx] < 0) {
                compact[idx] = static_cast<std::int64_t>(mesh.vertices.size());
                mesh.vertices.push_back(positions[idx]);
            }
            idx = static_cast<std::uint32_t>(compact[idx]);
        }
    mesh.faces = std::move(faces);
    if (mesh.empty()) return mesh;
    return vertex_normals(mesh).mesh;
}

void write_grid(const std::filesystem::path& stem, const DensityGrid& grid) {
    std::filesystem::path raw_path = stem;
    raw_path += ".raw";
    std::filesystem::path json_path = stem;
    json_path += ".json";
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw InputError("write_grid: cannot open " + raw_path.string());
    for (double v : grid.values()) {
        float f = static_cast<float>(v);
        std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        raw.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
    const Bounds3& b = grid.bounds();
    nlohmann::json header = {{"resolution", grid.resolution()},
                             {"bounds_min", {b.lo.x, b.lo.y, b.lo.z}},
                             {"bounds_max", {b.hi.x, b.hi.y, b.hi.z}},
                             {"dtype", "float32_le"}};
    std::ofstream js(json_path);
    if (!js) throw InputError("write_grid: cannot open " + json_path.string());
    js << header.dump(2) << '\n';
}

DensityGrid read_grid(const std::filesystem::path& stem) {
    std::filesystem::path raw_path = stem;
    raw_path += ".raw";
    std::filesystem::path json_path = stem;
    json_path += ".json";
    std::ifstream js(json_path);
    if (!js) throw InputError("read_grid: cannot open " + json_path.string());
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("read_grid: malformed header " + json_path.string() + ": " + e.what());
    }
    int res = header.at("resolution").get<int>();
    auto lo = header.at("bounds_min").get<std::array<double, 3>>();
    auto hi = header.at("bounds_max").get<std::array<double, 3>>();
    Bounds3 b;
    b.extend({lo[0], lo[1], lo[2]});
    b.extend({hi[0], hi[1], hi[2]});
    DensityGrid grid(res, b);
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw InputError("read_grid: cannot open " + raw_path.string());
    for (double& v : grid.values()) {
        std::uint32_t bits = 0;
        raw.read(reinterpret_cast<char*>(&bits), sizeof(bits));
        if (!raw) throw InputError("read_grid: truncated data in " + raw_path.string());
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        v = std::bit_cast<float>(bits);
    }
    return grid;
}

}  // namespace uvpbr
