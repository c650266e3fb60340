// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/pbr_textures.h"

#include "uvpbr/error.h"

namespace uvpbr {

PbrTextures::PbrTextures(int size) : maps(size) {
    maps.add_plane(kDiffuse, 3);
    maps.add_plane(kRoughness, 1);
    maps.add_plane(kMetalness, 1);
    maps.add_plane(kBakedColor, 3);
}

void PbrTextures::require_planes() const {
    for (const char* name : {kDiffuse, kRoughness, kMetalness})
        if (!maps.has_plane(name)) throw PreconditionError(std::string("pbr textures: missing plane '") + name + "'");
}

MaterialSample PbrTextures::material(std::size_t texel) const {
    return {maps.rgb(kDiffuse, texel), maps.scalar(kRoughness, texel), maps.scalar(kMetalness, texel)};
}

void PbrTextures::set_material(std::size_t texel, const MaterialSample& m) {
    maps.set_rgb(kDiffuse, texel, m.diffuse());
    maps.set_scalar(kRoughness, texel, m.roughness());
    maps.set_scalar(kMetalness, texel, m.metalness());
}

MaterialSample PbrTextures::sample_bilinear(const Vec2& uv) const {
    return {maps.sample_bilinear(kDiffuse, uv), maps.sample_bilinear(kRoughness, uv).x,
            maps.sample_bilinear(kMetalness, uv).x};
}

std::vector<std::filesystem::path> write_pbr(const std::filesystem::path& stem, const PbrTextures& pbr) {
    std::vector<std::filesystem::path> written = write_texel_grid(stem, pbr.maps);
    for (const std::string& name : pbr.maps.plane_names()) {
        auto png = with_suffix(stem, "_" + name + ".png");
        write_png(png, pbr.maps.plane(name), RowOrder::BottomUp);
        written.push_back(png);
    }
    return written;
}

PbrTextures read_pbr(const std::filesystem::path& stem) {
    PbrTextures pbr;
    pbr.maps = read_texel_grid(stem);
    pbr.require_planes();
    return pbr;
}

}  // namespace uvpbr
