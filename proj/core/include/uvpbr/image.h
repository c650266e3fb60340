// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "uvpbr/math.h"

namespace uvpbr {

/// Interleaved float raster with 1-4 channels. Row 0 is the first row in
/// memory; what it means on screen is decided by the caller (see RowOrder).
class Image {
  public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    float& at(int x, int y, int c) { return data_[index(x, y) + c]; }
    float at(int x, int y, int c) const { return data_[index(x, y) + c]; }

    /// RGB view of a pixel; single-channel images are replicated.
    Rgb rgb(int x, int y) const;
    void set_rgb(int x, int y, const Rgb& v);

    /// Bilinear lookup in continuous pixel coordinates (pixel centers at i + 0.5)
    /// with edge clamping. Returns the first min(3, channels) channels.
    Rgb sample_bilinear(double px, double py) const;

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    bool operator==(const Image&) const = default;

  private:
    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/// How memory rows map to picture rows.
enum class RowOrder {
    TopDown,   // row 0 is the top of the picture (camera images)
    BottomUp,  // row 0 is the bottom of the picture (UV textures, v up)
};

/// PFM (portable float map): 32-bit little-endian floats, linear values.
/// Images with 2 channels are padded to 3 on write.
void write_pfm(const std::filesystem::path& path, const Image& image, RowOrder order);
/// Reads a PFM file. `channels` > 0 truncates the result to that many channels.
Image read_pfm(const std::filesystem::path& path, RowOrder order, int channels = 0);

/// 8-bit sRGB PNG of the first three channels (or gray), clamped to [0, 1].
void write_png(const std::filesystem::path& path, const Image& image, RowOrder order);
/// Reads an 8-bit PNG and converts it to linear RGB.
Image read_png(const std::filesystem::path& path, RowOrder order);

/// Loads a PNG (sRGB) or PFM (linear) image as linear RGB based on the extension.
Image read_image(const std::filesystem::path& path, RowOrder order);

double srgb_to_linear(double v);
double linear_to_srgb(double v);

}  // namespace uvpbr
