// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/texel_grid.h"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "uvpbr/error.h"

namespace uvpbr {

TexelGrid::TexelGrid(int size) : size_(size) {
    if (size < 0) throw PreconditionError("texel grid: negative size");
    valid_.assign(texel_count(), 0);
}

Image& TexelGrid::add_plane(const std::string& name, int channels) {
    auto it = planes_.find(name);
    if (it != planes_.end()) {
        if (it->second.channels() != channels)
            throw PreconditionError("texel grid: plane '" + name + "' exists with a different channel count");
        return it->second;
    }
    return planes_.emplace(name, Image(size_, size_, channels)).first->second;
}

Image& TexelGrid::plane(const std::string& name) {
    auto it = planes_.find(name);
    if (it == planes_.end()) throw PreconditionError("texel grid: missing plane '" + name + "'");
    return it->second;
}

const Image& TexelGrid::plane(const std::string& name) const {
    auto it = planes_.find(name);
    if (it == planes_.end()) throw PreconditionError("texel grid: missing plane '" + name + "'");
    return it->second;
}

void TexelGrid::set_plane(const std::string& name, Image image) {
    if (image.width() != size_ || image.height() != size_)
        throw PreconditionError("texel grid: plane '" + name + "' has mismatched dimensions");
    planes_[name] = std::move(image);
}

std::vector<std::string> TexelGrid::plane_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : planes_) names.push_back(name);
    return names;
}

std::size_t TexelGrid::valid_count() const {
    std::size_t n = 0;
    for (std::uint8_t v : valid_) n += v;
    return n;
}

Rgb TexelGrid::rgb(const std::string& name, std::size_t i) const {
    return plane(name).rgb(static_cast<int>(i % size_), static_cast<int>(i / size_));
}

void TexelGrid::set_rgb(const std::string& name, std::size_t i, const Rgb& v) {
    plane(name).set_rgb(static_cast<int>(i % size_), static_cast<int>(i / size_), v);
}

double TexelGrid::scalar(const std::string& name, std::size_t i) const {
    return plane(name).at(static_cast<int>(i % size_), static_cast<int>(i / size_), 0);
}

void TexelGrid::set_scalar(const std::string& name, std::size_t i, double v) {
    plane(name).at(static_cast<int>(i % size_), static_cast<int>(i / size_), 0) = static_cast<float>(v);
}

Rgb TexelGrid::sample_bilinear(const std::string& name, const Vec2& uv) const {
    return plane(name).sample_bilinear(uv.x * size_, uv.y * size_);
}

Rgb TexelGrid::sample_nearest(const std::string& name, const Vec2& uv) const {
    int x = std::clamp(static_cast<int>(std::floor(uv.x * size_)), 0, size_ - 1);
    int y = std::clamp(static_cast<int>(std::floor(uv.y * size_)), 0, size_ - 1);
    return plane(name).rgb(x, y);
}

void TexelGrid::clear_invalid() {
    for (auto& [name, img] : planes_) {
        for (std::size_t i = 0; i < texel_count(); ++i) {
            if (valid_[i]) continue;
            int x = static_cast<int>(i % size_), y = static_cast<int>(i / size_);
            for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = 0.0f;
        }
    }
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
    std::filesystem::path p = stem;
    p += suffix;
    return p;
}

std::vector<std::filesystem::path> write_texel_grid(const std::filesystem::path& stem, const TexelGrid& grid) {
    std::vector<std::filesystem::path> written;
    nlohmann::json index = {{"size", grid.size()}, {"planes", nlohmann::json::object()}};
    for (const std::string& name : grid.plane_names()) {
        const Image& img = grid.plane(name);
        auto path = with_suffix(stem, "_" + name + ".pfm");
        write_pfm(path, img, RowOrder::BottomUp);
        index["planes"][name] = img.channels();
        written.push_back(path);
    }
    Image valid(grid.size(), grid.size(), 1);
    for (std::size_t i = 0; i < grid.texel_count(); ++i)
        valid.at(static_cast<int>(i % grid.size()), static_cast<int>(i / grid.size()), 0) = grid.valid(i) ? 1.0f : 0.0f;
    auto valid_path = with_suffix(stem, "_valid.pfm");
    write_pfm(valid_path, valid, RowOrder::BottomUp);
    written.push_back(valid_path);
    auto index_path = with_suffix(stem, ".json");
    std::ofstream out(index_path);
    if (!out) throw InputError("write_texel_grid: cannot open " + index_path.string());
    out << index.dump(2) << '\n';
    written.push_back(index_path);
    return written;
}

TexelGrid read_texel_grid(const std::filesystem::path& stem) {
    auto index_path = with_suffix(stem, ".json");
    std::ifstream in(index_path);
    if (!in) throw InputError("read_texel_grid: cannot open " + index_path.string());
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("read_texel_grid: malformed index " + index_path.string() + ": " + e.what());
    }
    TexelGrid grid(index.at("size").get<int>());
    for (const auto& [name, channels] : index.at("planes").items()) {
        Image img = read_pfm(with_suffix(stem, "_" + name + ".pfm"), RowOrder::BottomUp, channels.get<int>());
        grid.set_plane(name, std::move(img));
    }
    Image valid = read_pfm(with_suffix(stem, "_valid.pfm"), RowOrder::BottomUp, 1);
    if (valid.width() != grid.size() || valid.height() != grid.size())
        throw InputError("read_texel_grid: validity plane has mismatched size");
    for (std::size_t i = 0; i < grid.texel_count(); ++i)
        grid.set_valid(i, valid.at(static_cast<int>(i % grid.size()), static_cast<int>(i / grid.size()), 0) > 0.5f);
    return grid;
}

}  // namespace uvpbr
