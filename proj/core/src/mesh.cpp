// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/mesh.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>

#include "uvpbr/error.h"

namespace uvpbr {

Bounds3 TriMesh::bounds() const {
    Bounds3 b;
    for (const Vec3& v : vertices) b.extend(v);
    return b;
}

Vec3 TriMesh::face_normal(std::size_t f) const {
    const Face& t = faces[f];
    return normalize(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
}

double TriMesh::face_area(std::size_t f) const {
    const Face& t = faces[f];
    return 0.5 * length(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
}

double TriMesh::surface_area() const {
    double a = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(f);
    return a;
}

void TriMesh::validate() const {
    if (!normals.empty() && normals.size() != vertices.size())
        throw PreconditionError("mesh: normal count does not match vertex count");
    if (!uvs.empty() && uvs.size() != vertices.size())
        throw PreconditionError("mesh: uv count does not match vertex count");
    for (const Face& f : faces)
        for (std::uint32_t i : f)
            if (i >= vertices.size()) throw PreconditionError("mesh: face index out of range");
}

VertexNormalResult vertex_normals(const TriMesh& mesh) {
    mesh.validate();
    VertexNormalResult result{mesh, {}};
    std::vector<Vec3> accum(mesh.vertices.size());
    for (const Face& t : mesh.faces) {
        // Unnormalized cross product is twice the area times the unit normal.
        Vec3 n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        for (std::uint32_t i : t) accum[i] += n;
    }
    result.mesh.normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < accum.size(); ++i) {
        double len = length(accum[i]);
        if (len > 0) {
            result.mesh.normals[i] = accum[i] / len;
        } else {
            result.mesh.normals[i] = {0, 0, 1};
            result.isolated_vertices.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return result;
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed) {
    if (mesh.empty()) throw PreconditionError("sample_surface: mesh has no faces");
    if (count < 1) throw PreconditionError("sample_surface: count must be >= 1");
    std::vector<double> cdf(mesh.faces.size());
    double total = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        total += mesh.face_area(f);
        cdf[f] = total;
    }
    if (!(total > 0)) throw PreconditionError("sample_surface: mesh has zero surface area");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vec3> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double pick = uni(rng) * total;
        std::size_t f = std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin(),
                                              cdf.size() - 1);
        double su = std::sqrt(uni(rng));
        double v = uni(rng);
        double b0 = 1.0 - su, b1 = su * (1.0 - v), b2 = su * v;
        const Face& t = mesh.faces[f];
        points.push_back(mesh.vertices[t[0]] * b0 + mesh.vertices[t[1]] * b1 + mesh.vertices[t[2]] * b2);
    }
    return points;
}

long euler_characteristic(const TriMesh& mesh) {
    std::set<std::uint32_t> used;
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const Face& t : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            used.insert(t[k]);
            std::uint32_t a = t[k], b = t[(k + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    return static_cast<long>(used.size()) - static_cast<long>(edges.size()) + static_cast<long>(mesh.faces.size());
}

std::size_t connected_components(const TriMesh& mesh) {
    std::vector<std::uint32_t> parent(mesh.vertices.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Face& t : mesh.faces) {
        parent[find(t[1])] = find(t[0]);
        parent[find(t[2])] = find(t[0]);
    }
    std::set<std::uint32_t> roots;
    for (const Face& t : mesh.faces) roots.insert(find(t[0]));
    return roots.size();
}

TriMesh transformed(const TriMesh& mesh, const Similarity& t) {
    TriMesh out = mesh;
    for (Vec3& v : out.vertices) v = t.apply(v);
    for (Vec3& n : out.normals) n = normalize(t.rotation * n);
    return out;
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
    mesh.validate();
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("write_obj: cannot open " + path.string());
    for (const Vec3& v : mesh.vertices) std::fprintf(f, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    for (const Vec2& t : mesh.uvs) std::fprintf(f, "vt %.17g %.17g\n", t.x, t.y);
    for (const Vec3& n : mesh.normals) std::fprintf(f, "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
    bool vt = mesh.has_uvs(), vn = mesh.has_normals();
    for (const Face& t : mesh.faces) {
        std::fputc('f', f);
        for (std::uint32_t i : t) {
            unsigned idx = i + 1;
            if (vt && vn)
                std::fprintf(f, " %u/%u/%u", idx, idx, idx);
            else if (vt)
                std::fprintf(f, " %u/%u", idx, idx);
            else if (vn)
                std::fprintf(f, " %u//%u", idx, idx);
            else
                std::fprintf(f, " %u", idx);
        }
        std::fputc('\n', f);
    }
    bool ok = std::ferror(f) == 0;
    std::fclose(f);
    if (!ok) throw Error("write_obj: write failed for " + path.string());
}

TriMesh read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("read_obj: cannot open " + path.string());
    std::vector<Vec3> pos, nrm;
    std::vector<Vec2> tex;
    using Corner = std::tuple<long, long, long>;
    std::vector<std::vector<Corner>> polys;
    std::string line;
    std::size_t line_no = 0;
    auto resolve = [&](long idx, std::size_t n) -> long {
        if (idx < 0) return static_cast<long>(n) + idx;
        return idx - 1;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            pos.push_back(v);
        } else if (tag == "vn") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            nrm.push_back(v);
        } else if (tag == "vt") {
            Vec2 v;
            ls >> v.x >> v.y;
            tex.push_back(v);
        } else if (tag == "f") {
            std::vector<Corner> poly;
            std::string tok;
            while (ls >> tok) {
                long vi = 0, ti = 0, ni = 0;
                std::size_t s1 = tok.find('/');
                vi = std::stol(tok.substr(0, s1));
                if (s1 != std::string::npos) {
                    std::size_t s2 = tok.find('/', s1 + 1);
                    std::string ts = tok.substr(s1 + 1, s2 == std::string::npos ? std::string::npos : s2 - s1 - 1);
                    if (!ts.empty()) ti = std::stol(ts);
                    if (s2 != std::string::npos && s2 + 1 < tok.size()) ni = std::stol(tok.substr(s2 + 1));
                }
                poly.emplace_back(resolve(vi, pos.size()), ti ? resolve(ti, tex.size()) : -1,
                                  ni ? resolve(ni, nrm.size()) : -1);
            }
            if (poly.size() < 3)
                throw InputError("read_obj: face with fewer than 3 corners at line " + std::to_string(line_no));
            polys.push_back(std::move(poly));
        }
    }

    TriMesh mesh;
    std::map<Corner, std::uint32_t> corner_index;
    bool all_tex = true, all_nrm = true;
    for (const auto& poly : polys)
        for (const auto& [v, t, n] : poly) {
            all_tex = all_tex && t >= 0;
            all_nrm = all_nrm && n >= 0;
        }
    // Files whose attribute indices coincide (as written by write_obj) keep
    // their vertex order, including unreferenced vertices.
    bool aligned = (!all_tex || tex.size() == pos.size()) && (!all_nrm || nrm.size() == pos.size());
    for (const auto& poly : polys)
        for (const auto& [v, t, n] : poly)
            aligned = aligned && v >= 0 && v < static_cast<long>(pos.size()) && (!all_tex || t == v) &&
                      (!all_nrm || n == v);
    if (aligned) {
        mesh.vertices = pos;
        if (all_tex && !polys.empty()) mesh.uvs = tex;
        if (all_nrm && !polys.empty()) mesh.normals = nrm;
        for (const auto& poly : polys)
            for (std::size_t k = 1; k + 1 < poly.size(); ++k)
                mesh.faces.push_back({static_cast<std::uint32_t>(std::get<0>(poly[0])),
                                      static_cast<std::uint32_t>(std::get<0>(poly[k])),
                                      static_cast<std::uint32_t>(std::get<0>(poly[k + 1]))});
        return mesh;
    }
    auto vertex_of = [&](const Corner& c) {
        auto [v, t, n] = c;
        if (v < 0 || v >= static_cast<long>(pos.size()) || t >= static_cast<long>(tex.size()) ||
            n >= static_cast<long>(nrm.size()))
            throw InputError("read_obj: index out of range in " + path.string());
        Corner key{v, all_tex ? t : -1, all_nrm ? n : -1};
        auto [it, inserted] = corner_index.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (inserted) {
            mesh.vertices.push_back(pos[v]);
            if (all_tex && !polys.empty()) mesh.uvs.push_back(tex[t]);
            if (all_nrm && !polys.empty()) mesh.normals.push_back(nrm[n]);
        }
        return it->second;
    };
    for (const auto& poly : polys) {
        std::uint32_t a = vertex_of(poly[0]);
        for (std::size_t k = 1; k + 1 < poly.size(); ++k)
            mesh.faces.push_back({a, vertex_of(poly[k]), vertex_of(poly[k + 1])});
    }
    return mesh;
}

}  // namespace uvpbr
