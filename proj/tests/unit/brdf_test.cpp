// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "uvpbr/brdf.h"
#include "uvpbr/error.h"

namespace uvpbr {
namespace {

// Reference terms written out directly, independent of the library helpers.
double ref_d(double nh, double rho) {
    double a = std::max(rho * rho, 1e-4);
    double t = nh * nh * (a * a - 1) + 1;
    return a * a / (kPi * t * t);
}

double ref_g1(double c, double rho) {
    double k = (rho * rho + 1) * (rho * rho + 1) / 8;
    return c / (c * (1 - k) + k);
}

Rgb ref_eval(const Vec3& n, const Vec3& l, const Vec3& v, const Rgb& cd, double rho, double m) {
    Vec3 h = normalize(l + v);
    double nl = dot(n, l), nv = dot(n, v);
    Rgb f0 = cd * m + Rgb{0.04 * (1 - m)};
    double fw = std::pow(1 - dot(h, v), 5);
    Rgb f = f0 + (Rgb{1.0} - f0) * fw;
    Rgb spec = f * (ref_d(dot(n, h), rho) * ref_g1(nl, rho) * ref_g1(nv, rho) / std::max(4 * nl * nv, 1e-6));
    return cd * ((1 - m) / kPi) + spec;
}

Vec3 dir(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

TEST(Brdf, MatchesReferenceFormula) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    const Vec3 n{0, 0, 1};
    for (int i = 0; i < 2000; ++i) {
        Vec3 l = dir(u(rng) * 1.5, u(rng) * 2 * kPi), v = dir(u(rng) * 1.5, u(rng) * 2 * kPi);
        Rgb cd{u(rng), u(rng), u(rng)};
        double rho = u(rng), m = u(rng);
        Rgb got = brdf::eval(ShadingGeometry(n, l, v), MaterialSample(cd, rho, m));
        Rgb want = ref_eval(n, l, v, cd, rho, m);
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(got[c], want[c], 1e-10 * std::max(1.0, want[c]));
    }
}

TEST(Brdf, PureDielectricRoughIsNearlyLambertian) {
    const Vec3 n{0, 0, 1};
    Rgb f = brdf::eval(ShadingGeometry(n, n, n), MaterialSample(Rgb{0.5}, 1.0, 0.0));
    EXPECT_NEAR(f.x, 0.5 / kPi + 0.04 * ref_d(1, 1) / 4, 1e-12);
}

TEST(Brdf, MetalHasNoDiffuseLobe) {
    const Vec3 n{0, 0, 1};
    Vec3 l = dir(0.9, 0), v = dir(0.9, kPi);  // mirror pair
    Vec3 off = dir(0.9, 0.5 * kPi);           // far from the mirror direction
    MaterialSample metal(Rgb{0.8, 0.2, 0.1}, 0.05, 1.0);
    Rgb peak = brdf::eval(ShadingGeometry(n, l, v), metal);
    Rgb away = brdf::eval(ShadingGeometry(n, off, v), metal);
    EXPECT_GT(peak.x, 1.0);
    EXPECT_LT(away.x, 1e-3);
    // Tinted by the albedo at normal-ish incidence.
    EXPECT_GT(peak.x, peak.z);
}

TEST(Brdf, AlphaFloorKeepsZeroRoughnessFinite) {
    const Vec3 n{0, 0, 1};
    Rgb f = brdf::eval(ShadingGeometry(n, n, n), MaterialSample(Rgb{1.0}, 0.0, 1.0));
    EXPECT_TRUE(is_finite(f));
    EXPECT_NEAR(brdf::ggx_d(1.0, 0.0), 1.0 / (kPi * 1e-8), 1e-3 / (kPi * 1e-8));
}

TEST(Brdf, GrazingDenominatorIsFloored) {
    const Vec3 n{0, 0, 1};
    Vec3 l{1, 0, 0}, v = dir(1.0, kPi);
    Rgb f = brdf::eval(ShadingGeometry(n, l, v), MaterialSample(Rgb{0.5}, 0.3, 0.5));
    EXPECT_TRUE(is_finite(f));
}

TEST(Brdf, RejectsNonUnitVectors) {
    const Vec3 n{0, 0, 1};
    EXPECT_THROW(ShadingGeometry(n * 1.01, n, n), PreconditionError);
    EXPECT_THROW(ShadingGeometry(n, Vec3{0, 0, 0.5}, n), PreconditionError);
    EXPECT_NO_THROW(ShadingGeometry(n * (1 + 5e-7), n, n));
}

TEST(Brdf, FresnelEndpoints) {
    MaterialSample mat(Rgb{0.7, 0.3, 0.1}, 0.5, 0.25);
    Rgb f0 = mat.f0();
    EXPECT_NEAR(f0.x, 0.25 * 0.7 + 0.75 * 0.04, 1e-15);
    Rgb normal = brdf::fresnel(1.0, mat), grazing = brdf::fresnel(0.0, mat);
    EXPECT_NEAR(normal.y, f0.y, 1e-15);
    EXPECT_NEAR(grazing.z, 1.0, 1e-15);
}

TEST(Brdf, SmithIsProductOfSeparableTerms) {
    for (double rho : {0.05, 0.4, 1.0})
        EXPECT_NEAR(brdf::g_smith(0.3, 0.8, rho), ref_g1(0.3, rho) * ref_g1(0.8, rho), 1e-14);
    EXPECT_DOUBLE_EQ(brdf::schlick_k(1.0), 0.5);
}

// Property: the prediction is affine in albedo, with the same factor in every channel.
TEST(Brdf, AffineDecompositionReproducesEval) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    const Vec3 n{0, 0, 1};
    for (int i = 0; i < 500; ++i) {
        Vec3 l = dir(u(rng) * 1.5, u(rng) * 2 * kPi), v = dir(u(rng) * 1.5, u(rng) * 2 * kPi);
        double rho = u(rng), m = u(rng);
        Rgb cd{u(rng), u(rng), u(rng)};
        auto a = brdf::eval_affine(n, l, v, rho, m);
        Rgb f = brdf::eval_unchecked(n, l, v, MaterialSample(cd, rho, m));
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(f[c], a.diffuse_scale * cd[c] + a.offset, 1e-12 * std::max(1.0, f[c]));
    }
}

TEST(Brdf, NoEnergyBelowHorizon) {
    const Vec3 n{0, 0, 1};
    Vec3 below{0.6, 0, -0.8}, v = dir(0.4, 1.0);
    Rgb f = brdf::eval_unchecked(n, below, v, MaterialSample(Rgb{0.5}, 0.5, 0.5));
    EXPECT_EQ(f, Rgb{0.0});
}

}  // namespace
}  // namespace uvpbr
