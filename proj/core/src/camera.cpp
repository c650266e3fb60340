// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/camera.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "uvpbr/error.h"

namespace uvpbr {

Camera::Camera(const Mat3& rotation, const Vec3& translation, double fov_y, int width, int height,
               double near_plane, double far_plane)
    : rotation_(rotation),
      translation_(translation),
      fov_y_(fov_y),
      width_(width),
      height_(height),
      near_(near_plane),
      far_(far_plane),
      tan_half_(std::tan(0.5 * fov_y)) {
    if (!(fov_y > 0 && fov_y < kPi)) throw InputError("camera: fov_y must lie in (0, pi)");
    if (!(near_plane > 0 && near_plane < far_plane)) throw InputError("camera: require 0 < near < far");
    if (width < 1 || height < 1) throw InputError("camera: resolution must be positive");
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y, int width, int height) {
    Vec3 f = normalize(target - eye);
    Vec3 r = normalize(cross(f, up));
    if (length(r) == 0) throw InputError("camera: up vector is parallel to the view direction");
    Vec3 u = cross(r, f);
    Mat3 rot{{r.x, r.y, r.z, u.x, u.y, u.z, -f.x, -f.y, -f.z}};
    return Camera(rot, -(rot * eye), fov_y, width, height);
}

Camera Camera::orbit(double azimuth_deg, double elevation_deg, double radius, double fov_y_deg, int width,
                     int height) {
    if (!(radius > 0)) throw InputError("camera: orbit radius must be positive");
    double az = azimuth_deg * kPi / 180.0, el = elevation_deg * kPi / 180.0;
    Vec3 eye{radius * std::cos(el) * std::cos(az), radius * std::cos(el) * std::sin(az), radius * std::sin(el)};
    Camera cam = look_at(eye, {0, 0, 0}, {0, 0, 1}, fov_y_deg * kPi / 180.0, width, height);
    cam.orbit_ = OrbitParams{azimuth_deg, elevation_deg, radius, fov_y_deg};
    return cam;
}

Vec3 Camera::center() const { return rotation_.transposed() * (-translation_); }

Vec3 Camera::forward() const { return rotation_.transposed() * Vec3{0, 0, -1}; }

std::optional<Projection> Camera::project(const Vec3& world) const {
    Vec3 pc = rotation_ * world + translation_;
    double depth = -pc.z;
    if (depth < near_ || depth > far_) return std::nullopt;
    double aspect = static_cast<double>(width_) / height_;
    double ndc_x = pc.x / (depth * tan_half_ * aspect);
    double ndc_y = pc.y / (depth * tan_half_);
    return Projection{(ndc_x + 1.0) * 0.5 * width_, (1.0 - ndc_y) * 0.5 * height_, length(pc)};
}

Ray Camera::ray(double px, double py) const {
    double aspect = static_cast<double>(width_) / height_;
    double ndc_x = 2.0 * px / width_ - 1.0;
    double ndc_y = 1.0 - 2.0 * py / height_;
    Vec3 dc = normalize(Vec3{ndc_x * tan_half_ * aspect, ndc_y * tan_half_, -1.0});
    return {center(), rotation_.transposed() * dc};
}

std::vector<Camera> read_cameras(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("read_cameras: cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("read_cameras: malformed JSON in " + path.string() + ": " + e.what());
    }
    std::vector<Camera> cams;
    try {
        for (const auto& v : doc.at("views")) {
            int w = v.at("width").get<int>(), h = v.at("height").get<int>();
            double fov = v.at("fov_y_deg").get<double>();
            if (v.contains("matrix")) {
                auto m = v.at("matrix").get<std::array<std::array<double, 4>, 4>>();
                Mat3 rot{{m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]}};
                Vec3 t{m[0][3], m[1][3], m[2][3]};
                cams.emplace_back(rot, t, fov * kPi / 180.0, w, h, v.value("near", 0.01), v.value("far", 100.0));
            } else {
                cams.push_back(Camera::orbit(v.at("azimuth_deg").get<double>(), v.at("elevation_deg").get<double>(),
                                             v.at("radius").get<double>(), fov, w, h));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("read_cameras: " + path.string() + ": " + e.what());
    }
    return cams;
}

void write_cameras(const std::filesystem::path& path, const std::vector<Camera>& cameras) {
    nlohmann::json views = nlohmann::json::array();
    for (const Camera& c : cameras) {
        nlohmann::json v = {{"width", c.width()}, {"height", c.height()}, {"fov_y_deg", c.fov_y() * 180.0 / kPi}};
        if (c.orbit_params()) {
            const auto& o = *c.orbit_params();
            v["azimuth_deg"] = o.azimuth_deg;
            v["elevation_deg"] = o.elevation_deg;
            v["radius"] = o.radius;
            v["fov_y_deg"] = o.fov_y_deg;
        } else {
            const Mat3& r = c.rotation();
            const Vec3& t = c.translation();
            v["matrix"] = {{r(0, 0), r(0, 1), r(0, 2), t.x},
                           {r(1, 0), r(1, 1), r(1, 2), t.y},
                           {r(2, 0), r(2, 1), r(2, 2), t.z},
                           {0.0, 0.0, 0.0, 1.0}};
            v["near"] = c.near_plane();
            v["far"] = c.far_plane();
        }
        views.push_back(v);
    }
    std::ofstream out(path);
    if (!out) throw InputError("write_cameras: cannot open " + path.string());
    out << nlohmann::json{{"views", views}}.dump(2) << '\n';
}

}  // namespace uvpbr
