// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/lighting.h"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "uvpbr/error.h"

namespace uvpbr {

void EnvLight::validate() const {
    if (!latlong.empty()) {
        if (latlong.width() != 2 * latlong.height())
            throw PreconditionError("env light: lat-long raster must have width == 2 * height");
        for (float v : latlong.data())
            if (!(v >= 0.0f) || !std::isfinite(v)) throw PreconditionError("env light: radiance must be >= 0");
    }
    for (const PointLight& p : points)
        if (min_component(p.intensity) < 0 || !is_finite(p.intensity) || !is_finite(p.position))
            throw PreconditionError("env light: point light intensity must be finite and >= 0");
}

bool EnvLight::env_is_black() const {
    for (float v : latlong.data())
        if (v != 0.0f) return false;
    return true;
}

Rgb env_sample(const EnvLight& light, const Vec3& direction) {
    const Image& img = light.latlong;
    if (img.empty()) return {};
    double theta = std::acos(std::clamp(direction.z, -1.0, 1.0));
    double phi = std::atan2(direction.y, direction.x) + kPi;
    double px = phi / (2.0 * kPi) * img.width();
    double py = theta / kPi * img.height();
    // Longitude wraps, so sample with a manual horizontal wrap.
    double fx = px - 0.5;
    int x0 = static_cast<int>(std::floor(fx));
    double tx = fx - x0;
    auto wrap = [&](int x) { return ((x % img.width()) + img.width()) % img.width(); };
    double fy = std::clamp(py - 0.5, 0.0, img.height() - 1.0);
    int y0 = std::min(static_cast<int>(std::floor(fy)), img.height() - 1);
    int y1 = std::min(y0 + 1, img.height() - 1);
    double ty = fy - y0;
    Rgb a = img.rgb(wrap(x0), y0), b = img.rgb(wrap(x0 + 1), y0);
    Rgb c = img.rgb(wrap(x0), y1), d = img.rgb(wrap(x0 + 1), y1);
    return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
}

EnvLight read_lighting(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("read_lighting: cannot open " + path.string());
    EnvLight light;
    try {
        nlohmann::json doc = nlohmann::json::parse(in);
        for (const auto& p : doc.value("points", nlohmann::json::array())) {
            auto pos = p.at("pos").get<std::array<double, 3>>();
            auto rgb = p.at("rgb_intensity").get<std::array<double, 3>>();
            light.points.push_back({{pos[0], pos[1], pos[2]}, {rgb[0], rgb[1], rgb[2]}});
        }
        if (doc.contains("env") && !doc.at("env").is_null()) {
            std::filesystem::path env = doc.at("env").get<std::string>();
            if (env.is_relative()) env = path.parent_path() / env;
            light.latlong = read_pfm(env, RowOrder::TopDown, 3);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("read_lighting: " + path.string() + ": " + e.what());
    }
    try {
        light.validate();
    } catch (const PreconditionError& e) {
        throw InputError(std::string("read_lighting: ") + e.what());
    }
    return light;
}

std::vector<std::filesystem::path> write_lighting(const std::filesystem::path& path, const EnvLight& light) {
    std::vector<std::filesystem::path> written;
    nlohmann::json doc;
    doc["points"] = nlohmann::json::array();
    for (const PointLight& p : light.points)
        doc["points"].push_back({{"pos", {p.position.x, p.position.y, p.position.z}},
                                 {"rgb_intensity", {p.intensity.x, p.intensity.y, p.intensity.z}}});
    if (!light.latlong.empty() && !light.env_is_black()) {
        std::filesystem::path env = path.parent_path() / (path.stem().string() + "_env.pfm");
        write_pfm(env, light.latlong, RowOrder::TopDown);
        doc["env"] = env.filename().string();
        written.push_back(env);
    } else {
        doc["env"] = nullptr;
    }
    std::ofstream out(path);
    if (!out) throw InputError("write_lighting: cannot open " + path.string());
    out << doc.dump(2) << '\n';
    written.push_back(path);
    return written;
}

}  // namespace uvpbr
