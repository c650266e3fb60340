// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "uvpbr/image.h"
#include "uvpbr/math.h"

namespace uvpbr {

struct PointLight {
    Vec3 position;
    Rgb intensity;  // radiant intensity; irradiance falls off as 1/r^2
};

/// Known scene lighting: point lights plus an equirectangular environment of
/// linear radiance. Latitude 0 (top row) is +Z; longitude 0 sits at the left
/// edge and increases with atan2(y, x) + pi.
struct EnvLight {
    Image latlong;  // 3 channels, width == 2 * height; empty means black
    std::vector<PointLight> points;

    /// Throws PreconditionError on negative radiance or a bad aspect ratio.
    void validate() const;
    /// True when the environment contributes nothing.
    bool env_is_black() const;
};

/// Bilinear environment lookup for a unit direction (longitude wraps,
/// latitude clamps).
Rgb env_sample(const EnvLight& light, const Vec3& direction);

/// Lighting JSON: {points:[{pos:[x,y,z], rgb_intensity:[r,g,b]}], env:"<latlong.pfm>"}.
/// The env path is resolved relative to the JSON file.
EnvLight read_lighting(const std::filesystem::path& path);
/// Writes the JSON and, when the environment is not black, the lat-long PFM
/// next to it as `<json stem>_env.pfm`. Returns the paths written.
std::vector<std::filesystem::path> write_lighting(const std::filesystem::path& path, const EnvLight& light);

}  // namespace uvpbr
