// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uvpbr/image.h"
#include "uvpbr/math.h"

namespace uvpbr {

/// Square UV-space raster of named channel planes plus a per-texel validity bit.
///
/// Texel (x, y) covers u in [x, x+1)/size and v in [y, y+1)/size; its center
/// is ((x + 0.5) / size, (y + 0.5) / size). Planes are Images stored with v
/// increasing with the row index (RowOrder::BottomUp on disk).
class TexelGrid {
  public:
    TexelGrid() = default;
    explicit TexelGrid(int size);

    int size() const { return size_; }
    std::size_t texel_count() const { return static_cast<std::size_t>(size_) * size_; }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * size_ + x; }
    Vec2 texel_center(int x, int y) const { return {(x + 0.5) / size_, (y + 0.5) / size_}; }

    /// Adds a zero-filled plane, or returns the existing one if the channel count matches.
    Image& add_plane(const std::string& name, int channels);
    bool has_plane(const std::string& name) const { return planes_.contains(name); }
    Image& plane(const std::string& name);
    const Image& plane(const std::string& name) const;
    void set_plane(const std::string& name, Image image);
    void remove_plane(const std::string& name) { planes_.erase(name); }
    std::vector<std::string> plane_names() const;

    bool valid(std::size_t i) const { return valid_[i] != 0; }
    void set_valid(std::size_t i, bool v) { valid_[i] = v ? 1 : 0; }
    const std::vector<std::uint8_t>& valid_mask() const { return valid_; }
    std::size_t valid_count() const;

    Rgb rgb(const std::string& name, std::size_t i) const;
    void set_rgb(const std::string& name, std::size_t i, const Rgb& v);
    double scalar(const std::string& name, std::size_t i) const;
    void set_scalar(const std::string& name, std::size_t i, double v);

    /// Bilinear lookup at a UV coordinate with edge clamping.
    Rgb sample_bilinear(const std::string& name, const Vec2& uv) const;
    /// Value of the texel containing uv.
    Rgb sample_nearest(const std::string& name, const Vec2& uv) const;

    /// Zeros every channel of every invalid texel.
    void clear_invalid();

    bool operator==(const TexelGrid&) const = default;

  private:
    int size_ = 0;
    std::map<std::string, Image> planes_;
    std::vector<std::uint8_t> valid_;
};

/// Writes one PFM per plane as `<stem>_<name>.pfm`, the validity bits as
/// `<stem>_valid.pfm`, and an index `<stem>.json` listing planes and channel
/// counts. Returns every path written.
std::vector<std::filesystem::path> write_texel_grid(const std::filesystem::path& stem, const TexelGrid& grid);
TexelGrid read_texel_grid(const std::filesystem::path& stem);

/// Appends a suffix to the final path component: (dir/stem, "_x.pfm") -> dir/stem_x.pfm.
std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix);

}  // namespace uvpbr
