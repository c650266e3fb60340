// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/image.h"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "uvpbr/error.h"

namespace uvpbr {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1 || channels > 4)
        throw PreconditionError("image: invalid dimensions");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Rgb Image::rgb(int x, int y) const {
    std::size_t i = index(x, y);
    if (channels_ >= 3) return {data_[i], data_[i + 1], data_[i + 2]};
    if (channels_ == 2) return {data_[i], data_[i + 1], 0.0};
    return Rgb(data_[i]);
}

void Image::set_rgb(int x, int y, const Rgb& v) {
    std::size_t i = index(x, y);
    for (int c = 0; c < std::min(3, channels_); ++c) data_[i + c] = static_cast<float>(v[c]);
}

Rgb Image::sample_bilinear(double px, double py) const {
    double fx = px - 0.5, fy = py - 0.5;
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    double tx = fx - x0, ty = fy - y0;
    auto cx = [&](int x) { return std::clamp(x, 0, width_ - 1); };
    auto cy = [&](int y) { return std::clamp(y, 0, height_ - 1); };
    Rgb a = rgb(cx(x0), cy(y0)), b = rgb(cx(x0 + 1), cy(y0));
    Rgb c = rgb(cx(x0), cy(y0 + 1)), d = rgb(cx(x0 + 1), cy(y0 + 1));
    return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
}

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

namespace {

// File row r (PFM files are stored bottom row first) -> memory row.
int pfm_memory_row(int file_row, int height, RowOrder order) {
    return order == RowOrder::BottomUp ? file_row : height - 1 - file_row;
}

float swap_bytes(float f) { return std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f))); }

std::string open_error(const std::filesystem::path& path, const char* what) {
    return std::string(what) + ": cannot open " + path.string();
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Image& image, RowOrder order) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(open_error(path, "write_pfm"));
    int file_channels = image.channels() == 1 ? 1 : 3;
    out << (file_channels == 3 ? "PF\n" : "Pf\n") << image.width() << ' ' << image.height() << "\n-1.0\n";
    std::vector<float> row(static_cast<std::size_t>(image.width()) * file_channels, 0.0f);
    for (int r = 0; r < image.height(); ++r) {
        int y = pfm_memory_row(r, image.height(), order);
        for (int x = 0; x < image.width(); ++x)
            for (int c = 0; c < std::min(file_channels, image.channels()); ++c)
                row[static_cast<std::size_t>(x) * file_channels + c] = image.at(x, y, c);
        if constexpr (std::endian::native == std::endian::big) {
            for (float& f : row) f = swap_bytes(f);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) throw Error("write_pfm: write failed for " + path.string());
}

Image read_pfm(const std::filesystem::path& path, RowOrder order, int channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(open_error(path, "read_pfm"));
    std::string magic;
    int width = 0, height = 0;
    double scale = 0;
    in >> magic >> width >> height >> scale;
    in.get();
    if ((magic != "PF" && magic != "Pf") || width <= 0 || height <= 0 || scale == 0)
        throw InputError("read_pfm: malformed header in " + path.string());
    int file_channels = magic == "PF" ? 3 : 1;
    bool little = scale < 0;
    int out_channels = channels > 0 ? std::min(channels, file_channels) : file_channels;
    if (channels == 2 && file_channels == 3) out_channels = 2;
    Image image(width, height, out_channels);
    std::vector<float> row(static_cast<std::size_t>(width) * file_channels);
    for (int r = 0; r < height; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) throw InputError("read_pfm: truncated data in " + path.string());
        bool swap = little != (std::endian::native == std::endian::little);
        int y = pfm_memory_row(r, height, order);
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < out_channels; ++c) {
                float f = row[static_cast<std::size_t>(x) * file_channels + c];
                if (swap) f = swap_bytes(f);
                image.at(x, y, c) = f;
            }
    }
    return image;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const std::filesystem::path& path, const Image& image, RowOrder order) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw InputError(open_error(path, "write_png"));
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("write_png: libpng initialization failed");
    }
    std::vector<png_byte> rows(static_cast<std::size_t>(image.width()) * image.height() * 3);
    for (int y = 0; y < image.height(); ++y) {
        int src = order == RowOrder::TopDown ? y : image.height() - 1 - y;
        for (int x = 0; x < image.width(); ++x) {
            Rgb c = image.rgb(x, src);
            for (int k = 0; k < 3; ++k)
                rows[(static_cast<std::size_t>(y) * image.width() + x) * 3 + k] =
                    static_cast<png_byte>(std::lround(linear_to_srgb(c[k]) * 255.0));
        }
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("write_png: libpng error for " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height(); ++y)
        png_write_row(png, &rows[static_cast<std::size_t>(y) * image.width() * 3]);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image read_png(const std::filesystem::path& path, RowOrder order) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw InputError(open_error(path, "read_png"));
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("read_png: libpng initialization failed");
    }
    std::vector<png_byte> pixels;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("read_png: malformed PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    int width = static_cast<int>(png_get_image_width(png, info));
    int height = static_cast<int>(png_get_image_height(png, info));
    std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    row_ptrs.resize(height);
    for (int y = 0; y < height; ++y) row_ptrs[y] = &pixels[stride * y];
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    Image image(width, height, 3);
    for (int y = 0; y < height; ++y) {
        int dst = order == RowOrder::TopDown ? y : height - 1 - y;
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c)
                image.at(x, dst, c) = static_cast<float>(srgb_to_linear(pixels[stride * y + x * 3 + c] / 255.0));
    }
    return image;
}

Image read_image(const std::filesystem::path& path, RowOrder order) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return read_png(path, order);
    if (ext == ".pfm") return read_pfm(path, order, 3);
    throw InputError("read_image: unsupported image format " + path.string());
}

}  // namespace uvpbr
