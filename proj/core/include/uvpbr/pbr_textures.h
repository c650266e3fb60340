// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "uvpbr/brdf.h"
#include "uvpbr/texel_grid.h"

namespace uvpbr {

/// Diffuse albedo, roughness, metalness and lighting-baked color maps sharing
/// one UV layout. All values lie in [0, 1].
struct PbrTextures {
    static constexpr const char* kDiffuse = "diffuse";
    static constexpr const char* kRoughness = "roughness";
    static constexpr const char* kMetalness = "metalness";
    static constexpr const char* kBakedColor = "baked_color";

    TexelGrid maps;

    PbrTextures() = default;
    /// Allocates the four planes at the given size, all zero and invalid.
    explicit PbrTextures(int size);

    int size() const { return maps.size(); }
    /// Throws PreconditionError naming the first missing plane.
    void require_planes() const;

    MaterialSample material(std::size_t texel) const;
    void set_material(std::size_t texel, const MaterialSample& m);
    /// Bilinear fetch of every parameter plane.
    MaterialSample sample_bilinear(const Vec2& uv) const;
};

/// Writes `<stem>_<plane>.pfm` for each plane (plus the grid index) and sRGB
/// PNG previews `<stem>_<plane>.png`.
std::vector<std::filesystem::path> write_pbr(const std::filesystem::path& stem, const PbrTextures& pbr);
PbrTextures read_pbr(const std::filesystem::path& stem);

}  // namespace uvpbr
