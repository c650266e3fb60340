// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "uvpbr/math.h"

namespace uvpbr {

/// Per-texel SVBRDF parameters: diffuse albedo, roughness and metalness.
/// Every component is clamped to [0, 1] on construction.
class MaterialSample {
  public:
    MaterialSample() = default;
    MaterialSample(const Rgb& diffuse, double roughness, double metalness);

    const Rgb& diffuse() const { return diffuse_; }
    double roughness() const { return roughness_; }
    double metalness() const { return metalness_; }

    /// Reflectance at normal incidence: m * c_d + (1 - m) * 0.04.
    Rgb f0() const;

  private:
    Rgb diffuse_{0.5};
    double roughness_ = 0.5;
    double metalness_ = 0.0;
};

/// Unit normal, light and view directions. The half vector is always derived
/// from l and v and never stored.
class ShadingGeometry {
  public:
    static constexpr double kUnitTolerance = 1e-6;

    /// Throws PreconditionError if any input deviates from unit length by more
    /// than kUnitTolerance.
    ShadingGeometry(const Vec3& n, const Vec3& l, const Vec3& v);

    const Vec3& n() const { return n_; }
    const Vec3& l() const { return l_; }
    const Vec3& v() const { return v_; }
    Vec3 h() const { return normalize(l_ + v_); }

  private:
    Vec3 n_, l_, v_;
};

namespace brdf {

/// Roughness-derived alpha is floored here so the NDF stays finite at rho = 0.
inline constexpr double kAlphaFloor = 1e-4;
/// Floor applied to 4 (n.l)(n.v) in the specular denominator.
inline constexpr double kDenominatorFloor = 1e-6;
/// Dielectric reflectance at normal incidence.
inline constexpr double kDielectricF0 = 0.04;

/// Isotropic GGX normal distribution with alpha = rho^2.
double ggx_d(double n_dot_h, double rho);

/// Schlick-GGX single-direction masking term x / (x (1 - k) + k).
double g_sub(double cos_theta, double k);

/// k = (rho^2 + 1)^2 / 8.
double schlick_k(double rho);

/// Separable Smith masking-shadowing G_sub(n.l) * G_sub(n.v).
double g_smith(double n_dot_l, double n_dot_v, double rho);

/// Schlick Fresnel with F0 taken from the material.
Rgb fresnel(double h_dot_v, const MaterialSample& mat);

/// Diffuse + GGX specular reflectance for one light/view pair. Zero whenever
/// n.l <= 0 or n.v <= 0.
Rgb eval(const ShadingGeometry& geom, const MaterialSample& mat);

/// Same as eval() but without unit-length validation; for inner loops whose
/// directions are normalized by construction.
Rgb eval_unchecked(const Vec3& n, const Vec3& l, const Vec3& v, const MaterialSample& mat);

/// Decomposition of eval_unchecked() that is affine in the diffuse albedo:
/// result = diffuse_scale * c_d + offset, per channel. Both terms depend only
/// on roughness and metalness.
struct AffineResponse {
    double diffuse_scale = 0;  // multiplies c_d (same factor for all channels)
    double offset = 0;         // constant part, identical across channels
};
AffineResponse eval_affine(const Vec3& n, const Vec3& l, const Vec3& v, double rho, double metalness);

}  // namespace brdf
}  // namespace uvpbr
