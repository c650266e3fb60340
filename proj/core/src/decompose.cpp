// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/decompose.h"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "uvpbr/error.h"
#include "uvpbr/fuse.h"
#include "uvpbr/intersect.h"
#include "uvpbr/parallel.h"

namespace uvpbr {

std::size_t TexelObservation::visible_count() const {
    std::size_t n = 0;
    for (std::uint8_t v : visible) n += v;
    return n;
}

TexelObservation gather_observation(const TexelGrid& attributes, std::span<const ViewMapSet> sets, std::size_t i,
                                    const LightingSetup& setup) {
    TexelObservation obs;
    obs.position = attributes.rgb("position", i);
    obs.normal = normalize(attributes.rgb("normal", i));
    for (const ViewMapSet& set : sets) {
        bool vis = set.visible(i);
        obs.visible.push_back(vis ? 1 : 0);
        obs.colors.push_back(vis ? set.maps.rgb(ViewMapSet::kColor, i) : Rgb{});
        obs.viewdirs.push_back(vis ? set.maps.rgb(ViewMapSet::kViewdir, i) : Vec3{});
    }
    if (obs.visible_count() > 0) obs.lights = gather_light_samples(setup, obs.position, obs.normal, i);
    return obs;
}

double rendering_residual(const TexelObservation& obs, const MaterialSample& mat) {
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t v = 0; v < obs.visible.size(); ++v) {
        if (!obs.visible[v]) continue;
        Rgb d = shade(obs.lights, obs.normal, obs.viewdirs[v], mat) - obs.colors[v];
        sum += dot(d, d);
        count += 3;
    }
    return count ? sum / count : 0.0;
}

namespace {

// Per visible view, the prediction is A * c_d + B channel-wise.
struct AffineView {
    Rgb a, b, observed;
};

std::vector<AffineView> affine_views(const TexelObservation& obs, double rho, double metalness) {
    std::vector<AffineView> out;
    for (std::size_t v = 0; v < obs.visible.size(); ++v) {
        if (!obs.visible[v]) continue;
        AffineView av{{}, {}, obs.colors[v]};
        for (const LightSample& s : obs.lights) {
            brdf::AffineResponse r = brdf::eval_affine(obs.normal, s.direction, obs.viewdirs[v], rho, metalness);
            av.a += s.weight * r.diffuse_scale;
            av.b += s.weight * r.offset;
        }
        out.push_back(av);
    }
    return out;
}

struct LinearSolve {
    Rgb diffuse;
    Rgb sensitivity;  // sum of squared responses per channel
};

LinearSolve solve_diffuse(const std::vector<AffineView>& views) {
    LinearSolve s;
    Rgb num;
    for (const AffineView& v : views) {
        num += v.a * (v.observed - v.b);
        s.sensitivity += v.a * v.a;
    }
    for (int c = 0; c < 3; ++c) s.diffuse[c] = s.sensitivity[c] > 0 ? std::clamp(num[c] / s.sensitivity[c], 0.0, 1.0) : 0.0;
    return s;
}

double affine_residual(const std::vector<AffineView>& views, const Rgb& diffuse) {
    double sum = 0;
    for (const AffineView& v : views) {
        Rgb d = v.a * diffuse + v.b - v.observed;
        sum += dot(d, d);
    }
    return views.empty() ? 0.0 : sum / (3.0 * views.size());
}

void require_visible(const TexelObservation& obs, const char* who) {
    if (obs.visible_count() == 0) throw PreconditionError(std::string(who) + ": texel has no visible views");
    if (obs.colors.size() != obs.visible.size() || obs.viewdirs.size() != obs.visible.size())
        throw PreconditionError(std::string(who) + ": inconsistent per-view arrays");
}

// Residual vector and Jacobian of the 5-parameter model (c_r, c_g, c_b, rho, m).
class TexelModel {
  public:
    explicit TexelModel(const TexelObservation& obs) : obs_(obs) {}

    double cost(const Eigen::Matrix<double, 5, 1>& x) const {
        return affine_residual(blend(x[3], x[4]), {x[0], x[1], x[2]});
    }

    void linearize(const Eigen::Matrix<double, 5, 1>& x, Eigen::MatrixXd& jac, Eigen::VectorXd& res) const {
        const double rho = x[3], m = x[4];
        const Rgb c{x[0], x[1], x[2]};
        auto views = blend(rho, m);
        // Finite difference in roughness; one-sided at the box edges.
        const double h = 1e-4;
        double lo = std::max(0.0, rho - h), hi = std::min(1.0, rho + h);
        auto v_lo = blend(lo, m), v_hi = blend(hi, m);
        // Prediction is affine in metalness, so its derivative is exact.
        auto v_m0 = affine_views(obs_, rho, 0.0), v_m1 = affine_views(obs_, rho, 1.0);
        const std::size_t n = views.size();
        jac.setZero(3 * n, 5);
        res.resize(3 * n);
        for (std::size_t i = 0; i < n; ++i)
            for (int ch = 0; ch < 3; ++ch) {
                std::size_t r = 3 * i + ch;
                res[r] = views[i].a[ch] * c[ch] + views[i].b[ch] - views[i].observed[ch];
                jac(r, ch) = views[i].a[ch];
                double p_hi = v_hi[i].a[ch] * c[ch] + v_hi[i].b[ch];
                double p_lo = v_lo[i].a[ch] * c[ch] + v_lo[i].b[ch];
                jac(r, 3) = (p_hi - p_lo) / (hi - lo);
                jac(r, 4) = (v_m1[i].a[ch] - v_m0[i].a[ch]) * c[ch] + (v_m1[i].b[ch] - v_m0[i].b[ch]);
            }
    }

  private:
    std::vector<AffineView> blend(double rho, double m) const { return affine_views(obs_, rho, m); }
    const TexelObservation& obs_;
};

Eigen::Matrix<double, 5, 1> clamp_box(Eigen::Matrix<double, 5, 1> x) {
    for (int k = 0; k < 5; ++k) x[k] = std::clamp(x[k], 0.0, 1.0);
    return x;
}

}  // namespace

DiffuseFit fit_diffuse_texel(const TexelObservation& obs, double rho, double metalness) {
    require_visible(obs, "fit_diffuse_texel");
    auto views = affine_views(obs, rho, metalness);
    DiffuseFit fit;
    fit.low_confidence = true;
    for (const AffineView& v : views)
        if (max_component(Rgb{std::abs(v.a.x), std::abs(v.a.y), std::abs(v.a.z)}) >= 1e-6) fit.low_confidence = false;
    if (fit.low_confidence) return fit;
    fit.diffuse = solve_diffuse(views).diffuse;
    return fit;
}

std::vector<LandscapeCell> fit_landscape(const TexelObservation& obs) {
    require_visible(obs, "fit_landscape");
    std::vector<LandscapeCell> cells;
    for (int m = 0; m <= 1; ++m)
        for (int k = 1; k <= 20; ++k) {
            double rho = 0.05 * k;
            auto views = affine_views(obs, rho, m);
            Rgb c = solve_diffuse(views).diffuse;
            cells.push_back({rho, static_cast<double>(m), c, affine_residual(views, c)});
        }
    return cells;
}

TexelFit fit_texel_full(const TexelObservation& obs, const FitOptions& options) {
    require_visible(obs, "fit_texel_full");
    auto cells = fit_landscape(obs);
    std::size_t best = 0;
    for (std::size_t k = 1; k < cells.size(); ++k)
        if (cells[k].residual < cells[best].residual) best = k;

    TexelModel model(obs);
    Eigen::Matrix<double, 5, 1> x;
    x << cells[best].diffuse.x, cells[best].diffuse.y, cells[best].diffuse.z, cells[best].roughness,
        cells[best].metalness;
    double cost = model.cost(x);
    double lambda = 1e-3;
    Eigen::MatrixXd jac;
    Eigen::VectorXd res;
    for (int it = 0; it < options.iterations && cost > 0; ++it) {
        model.linearize(x, jac, res);
        Eigen::Matrix<double, 5, 5> h = jac.transpose() * jac;
        Eigen::Matrix<double, 5, 1> g = jac.transpose() * res;
        Eigen::Matrix<double, 5, 5> damped = h;
        for (int k = 0; k < 5; ++k) damped(k, k) += lambda * h(k, k) + 1e-12;
        Eigen::Matrix<double, 5, 1> step = damped.ldlt().solve(-g);
        Eigen::Matrix<double, 5, 1> trial = clamp_box(x + step);
        double trial_cost = model.cost(trial);
        if (std::isfinite(trial_cost) && trial_cost < cost) {
            x = trial;
            cost = trial_cost;
            lambda = std::max(lambda / 3.0, 1e-9);
        } else {
            lambda = std::min(lambda * 4.0, 1e8);
        }
    }

    TexelFit fit;
    fit.material = MaterialSample({x[0], x[1], x[2]}, x[3], x[4]);
    fit.residual = rendering_residual(obs, fit.material);
    fit.visible_views = obs.visible_count();

    const LandscapeCell& b = cells[best];
    bool single_basin = true;
    for (const LandscapeCell& c : cells) {
        if (c.residual > b.residual + options.equivalence_tolerance) continue;
        Rgb d = c.diffuse - b.diffuse;
        double spread = max_component(Rgb{std::abs(d.x), std::abs(d.y), std::abs(d.z)});
        if (c.metalness != b.metalness || spread > options.max_albedo_spread) single_basin = false;
    }
    // Linearized standard error of the albedo with the other parameters
    // re-optimized; the noise level is estimated from the residual.
    model.linearize(x, jac, res);
    Eigen::Matrix<double, 5, 5> info = jac.transpose() * jac;
    for (int k = 0; k < 5; ++k) info(k, k) += 1e-12;
    Eigen::Matrix<double, 5, 5> cov = info.ldlt().solve(Eigen::Matrix<double, 5, 5>::Identity());
    // Without spare observations the noise level cannot be estimated.
    const double dof = static_cast<double>(res.size()) - 5.0;
    const double sigma2 = std::max(res.squaredNorm() / std::max(dof, 1.0), options.noise_floor * options.noise_floor);
    fit.albedo_stddev = dof > 0 ? 0.0 : std::numeric_limits<double>::infinity();
    for (int c = 0; c < 3 && dof > 0; ++c) fit.albedo_stddev = std::max(fit.albedo_stddev, std::sqrt(std::max(0.0, cov(c, c)) * sigma2));
    const bool pinned = fit.albedo_stddev <= options.max_albedo_stddev;
    fit.confident = single_basin && pinned && fit.residual <= options.max_residual;
    return fit;
}

LightingSetup decompose_lighting(const TriMesh& mesh, const MeshIntersector* occluder, const EnvLight& light,
                                 const DecomposeOptions& options) {
    LightingSetup setup;
    setup.light = &light;
    setup.occluder = options.shadows ? occluder : nullptr;
    setup.env_samples = options.env_samples;
    setup.seed = options.seed;
    setup.shadow_bias = options.shadow_bias > 0 ? options.shadow_bias : 1e-3 * mesh.bounds().diagonal();
    return setup;
}

DecomposeResult decompose_texture(const TexelGrid& fused, std::span<const ViewMapSet> sets,
                                  const TexelGrid& attributes, const TriMesh& mesh, const EnvLight& light,
                                  const DecomposeOptions& options) {
    const int size = attributes.size();
    if (fused.size() != size) throw PreconditionError("decompose: fused texture and atlas differ in size");
    for (const ViewMapSet& s : sets)
        if (s.maps.size() != size) throw PreconditionError("decompose: view map set and atlas differ in size");
    light.validate();

    DecomposeResult result;
    result.pbr = PbrTextures(size);
    result.diagnostics = TexelGrid(size);
    result.diagnostics.add_plane("residual", 1);
    result.diagnostics.add_plane("confidence", 1);
    result.view_residuals.assign(sets.size(), std::numeric_limits<double>::quiet_NaN());
    if (attributes.valid_count() == 0) return result;

    MeshIntersector occluder(mesh);
    LightingSetup setup = decompose_lighting(mesh, &occluder, light, options);

    const std::size_t n = attributes.texel_count();
    std::vector<std::uint8_t> confident(n, 0);
    parallel_for(n, [&](std::size_t i) {
        if (!attributes.valid(i)) return;
        TexelObservation obs = gather_observation(attributes, sets, i, setup);
        if (obs.visible_count() == 0) return;
        TexelFit fit = fit_texel_full(obs, options.fit);
        result.pbr.set_material(i, fit.material);
        result.diagnostics.set_valid(i, true);
        result.diagnostics.set_scalar("residual", i, fit.residual);
        result.diagnostics.set_scalar("confidence", i, fit.confident ? 1.0 : 0.0);
        confident[i] = fit.confident ? 1 : 0;
    });
    for (std::size_t i = 0; i < n; ++i) {
        result.fitted_texels += result.diagnostics.valid(i) ? 1 : 0;
        result.confident_texels += confident[i];
    }

    const auto& domain = attributes.valid_mask();
    for (const char* name : {PbrTextures::kDiffuse, PbrTextures::kRoughness, PbrTextures::kMetalness})
        result.pbr.maps.set_plane(name, pull_push_fill(result.pbr.maps.plane(name), confident, domain));
    if (fused.has_plane("color")) result.pbr.maps.set_plane(PbrTextures::kBakedColor, fused.plane("color"));
    for (std::size_t i = 0; i < n; ++i) result.pbr.maps.set_valid(i, domain[i] != 0);
    result.pbr.maps.clear_invalid();

    // Report the residual of the final (stored) textures per view, through
    // the same forward model used to re-render them.
    for (std::size_t v = 0; v < sets.size(); ++v) {
        TexelGrid shown = render_texels(attributes, result.pbr, sets[v], setup);
        double sum = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!shown.valid(i)) continue;
            Rgb d = shown.rgb("color", i) - sets[v].maps.rgb(ViewMapSet::kColor, i);
            sum += dot(d, d);
            count += 3;
        }
        if (count) result.view_residuals[v] = sum / count;
    }
    return result;
}

}  // namespace uvpbr
