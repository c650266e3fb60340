// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "uvpbr/math.h"

namespace uvpbr {

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit
};

/// Where a world point lands on the image.
struct Projection {
    double px = 0, py = 0;  // continuous pixel coordinates, row 0 at the top
    double distance = 0;    // distance from the camera center
};

/// Calibrated pinhole camera. Camera space looks down -Z with +Y up; the pose
/// maps world to camera coordinates: p_cam = rotation * p + translation.
class Camera {
  public:
    Camera(const Mat3& rotation, const Vec3& translation, double fov_y, int width, int height,
           double near_plane = 0.01, double far_plane = 100.0);

    /// Camera at `eye` looking at `target`; `up` must not be parallel to the view direction.
    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y, int width, int height);
    /// Camera on a sphere around the origin, Z up: azimuth from +X toward +Y,
    /// elevation above the XY plane.
    static Camera orbit(double azimuth_deg, double elevation_deg, double radius, double fov_y_deg, int width,
                        int height);

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    double fov_y() const { return fov_y_; }
    int width() const { return width_; }
    int height() const { return height_; }
    double near_plane() const { return near_; }
    double far_plane() const { return far_; }
    Vec3 center() const;
    /// Unit vector along the principal (optical) axis, in world space.
    Vec3 forward() const;

    /// Projects a world point; nullopt if it lies outside the near/far range.
    std::optional<Projection> project(const Vec3& world) const;
    /// World-space ray through continuous pixel coordinates.
    Ray ray(double px, double py) const;

    /// Orbit parameters when the camera was built by orbit(); written back to JSON.
    struct OrbitParams {
        double azimuth_deg, elevation_deg, radius, fov_y_deg;
    };
    const std::optional<OrbitParams>& orbit_params() const { return orbit_; }

  private:
    Mat3 rotation_;
    Vec3 translation_;
    double fov_y_;
    int width_, height_;
    double near_, far_;
    double tan_half_;
    std::optional<OrbitParams> orbit_;
};

/// `{views:[{azimuth_deg, elevation_deg, radius, fov_y_deg, width, height}]}`;
/// a view may instead carry `matrix` (4x4 row-major world-to-camera) plus
/// `fov_y_deg`, `width`, `height`.
std::vector<Camera> read_cameras(const std::filesystem::path& path);
void write_cameras(const std::filesystem::path& path, const std::vector<Camera>& cameras);

}  // namespace uvpbr
