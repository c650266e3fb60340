// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/brdf.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uvpbr/error.h"

namespace uvpbr {

namespace {

double clamp_unit(double x) { return std::isfinite(x) ? std::clamp(x, 0.0, 1.0) : 0.0; }

void require_unit(const Vec3& v, const char* name) {
    double len = length(v);
    if (!(std::abs(len - 1.0) <= ShadingGeometry::kUnitTolerance)) {
        std::ostringstream msg;
        msg << "shading geometry: " << name << " is not unit length (|" << name << "| = " << len << ")";
        throw PreconditionError(msg.str());
    }
}

double pow5(double x) {
    double x2 = x * x;
    return x2 * x2 * x;
}

}  // namespace

MaterialSample::MaterialSample(const Rgb& diffuse, double roughness, double metalness)
    : diffuse_{clamp_unit(diffuse.x), clamp_unit(diffuse.y), clamp_unit(diffuse.z)},
      roughness_(clamp_unit(roughness)),
      metalness_(clamp_unit(metalness)) {}

Rgb MaterialSample::f0() const {
    return diffuse_ * metalness_ + Rgb(brdf::kDielectricF0 * (1.0 - metalness_));
}

ShadingGeometry::ShadingGeometry(const Vec3& n, const Vec3& l, const Vec3& v) : n_(n), l_(l), v_(v) {
    require_unit(n, "n");
    require_unit(l, "l");
    require_unit(v, "v");
}

namespace brdf {

double ggx_d(double n_dot_h, double rho) {
    if (n_dot_h < 0) return 0.0;
    double alpha = std::max(rho * rho, kAlphaFloor);
    double a2 = alpha * alpha;
    double t = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0;
    return a2 / (kPi * t * t);
}

double schlick_k(double rho) {
    double r2p1 = rho * rho + 1.0;
    return r2p1 * r2p1 / 8.0;
}

double g_sub(double cos_theta, double k) {
    if (cos_theta <= 0) return 0.0;
    return cos_theta / (cos_theta * (1.0 - k) + k);
}

double g_smith(double n_dot_l, double n_dot_v, double rho) {
    double k = schlick_k(rho);
    return g_sub(n_dot_l, k) * g_sub(n_dot_v, k);
}

Rgb fresnel(double h_dot_v, const MaterialSample& mat) {
    double w = pow5(1.0 - std::clamp(h_dot_v, 0.0, 1.0));
    Rgb f0 = mat.f0();
    return f0 + (Rgb(1.0) - f0) * w;
}

Rgb eval_unchecked(const Vec3& n, const Vec3& l, const Vec3& v, const MaterialSample& mat) {
    double n_dot_l = dot(n, l);
    double n_dot_v = dot(n, v);
    if (n_dot_l <= 0 || n_dot_v <= 0) return {};
    Vec3 h = normalize(l + v);
    double rho = mat.roughness();
    double d = ggx_d(dot(n, h), rho);
    double g = g_smith(n_dot_l, n_dot_v, rho);
    Rgb f = fresnel(dot(h, v), mat);
    double denom = std::max(4.0 * n_dot_l * n_dot_v, kDenominatorFloor);
    Rgb diffuse = mat.diffuse() * ((1.0 - mat.metalness()) * kInvPi);
    return diffuse + f * (d * g / denom);
}

Rgb eval(const ShadingGeometry& geom, const MaterialSample& mat) {
    return eval_unchecked(geom.n(), geom.l(), geom.v(), mat);
}

AffineResponse eval_affine(const Vec3& n, const Vec3& l, const Vec3& v, double rho, double metalness) {
    double n_dot_l = dot(n, l);
    double n_dot_v = dot(n, v);
    if (n_dot_l <= 0 || n_dot_v <= 0) return {};
    rho = clamp_unit(rho);
    metalness = clamp_unit(metalness);
    Vec3 h = normalize(l + v);
    double spec = ggx_d(dot(n, h), rho) * g_smith(n_dot_l, n_dot_v, rho) /
                  std::max(4.0 * n_dot_l * n_dot_v, kDenominatorFloor);
    // F = F0 (1 - w) + w with F0 = m c_d + (1 - m) 0.04.
    double w = pow5(1.0 - std::clamp(dot(h, v), 0.0, 1.0));
    AffineResponse r;
    r.diffuse_scale = (1.0 - metalness) * kInvPi + spec * metalness * (1.0 - w);
    r.offset = spec * ((1.0 - metalness) * kDielectricF0 * (1.0 - w) + w);
    return r;
}

}  // namespace brdf
}  // namespace uvpbr
