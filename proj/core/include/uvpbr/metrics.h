// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvpbr/image.h"
#include "uvpbr/math.h"
#include "uvpbr/mesh.h"

namespace uvpbr {

/// Loss-balancing coefficients of the geometry and appearance objectives.
struct LossWeights {
    double lambda_z = 0.5;
    double lambda_M = 1.0;
    double lambda_n = 0.2;
    double lambda_1 = 0.7;
    double lambda_2 = 0.3;
    double lambda_3 = 0.1;
    int n_views = 10;

    /// Throws PreconditionError on a negative weight or n_views < 1.
    void validate() const;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

/// Depth (1 channel), mask (1 channel, 0/1) and unit normal (3 channels) maps
/// of one view.
struct GeometryMaps {
    Image depth;
    Image mask;
    Image normal;
};

/// Weighted components; the perceptual slot is always 0 (no learned metric).
struct GeometryLoss {
    double depth = 0;
    double mask = 0;
    double normal = 0;
    double perceptual = 0;
    double total() const { return depth + mask + normal + perceptual; }
};

/// lambda_z * mean |z_gt - z| over pixels where both masks are set,
/// lambda_M * MSE(masks), lambda_n * mean angular error (radians) over the
/// same pixels.
GeometryLoss loss_geo(const GeometryMaps& pred, const GeometryMaps& gt, const LossWeights& w = {});
/// Mean of loss_geo over paired views.
GeometryLoss loss_geo_views(std::span<const GeometryMaps> pred, std::span<const GeometryMaps> gt,
                            const LossWeights& w = {});

struct ImageLoss {
    double mse = 0;         // weighted
    double perceptual = 0;  // absent, always 0
    double ssim = 0;        // weighted (1 - SSIM)
    double total() const { return mse + perceptual + ssim; }
};

ImageLoss loss_l0(const Image& x, const Image& y, const LossWeights& w = {});

/// Mean SSIM over channels with an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 1, evaluated where the window fits.
double ssim(const Image& x, const Image& y);
double mse(const Image& x, const Image& y);
/// 10 log10(1 / MSE), capped at 99 dB when MSE < 1e-10.
double psnr(const Image& x, const Image& y);

/// Nearest-neighbor index over a fixed 3D point set.
class PointIndex {
  public:
    explicit PointIndex(std::span<const Vec3> points);
    ~PointIndex();
    PointIndex(PointIndex&&) noexcept;
    PointIndex& operator=(PointIndex&&) noexcept;

    /// Index and distance of the closest point.
    std::pair<std::size_t, double> nearest(const Vec3& q) const;
    std::size_t size() const { return count_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t count_ = 0;
};

struct PointSetScore {
    double chamfer = 0;  // mean of the two directed mean NN distances
    double fscore = 0;
    double precision = 0;  // fraction of `a` within threshold of `b`
    double recall = 0;     // fraction of `b` within threshold of `a`
};

PointSetScore chamfer_fscore(std::span<const Vec3> a, std::span<const Vec3> b, double threshold);

/// Similarity that maps the mesh bounding box into [-1, 1]^3 (uniform scale,
/// longest side spans the cube).
Similarity normalize_to_unit_box(const TriMesh& mesh);

struct AlignOptions {
    int yaw_steps = 16;
    int scale_steps = 8;
    double scale_min = 0.7;
    double scale_max = 1.4;
    int icp_iterations = 50;
    std::size_t samples = 10000;
    /// Points per set used to run ICP from every initialization.
    std::size_t coarse_samples = 1000;
    /// Best coarse candidates re-run on the full sample sets.
    std::size_t refine_candidates = 4;
    double threshold = 0.1;
    std::uint64_t seed = 0;
};

struct AlignInit {
    double yaw = 0;  // radians about +Z
    double scale = 1;
};

/// The yaw x scale grid used to start ICP.
std::vector<AlignInit> alignment_initializations(const AlignOptions& options);

struct AlignResult {
    /// Maps pred into the gt frame.
    Similarity transform;
    AlignInit init;
    /// Scores of the chosen candidate in the normalized gt frame.
    double fscore = 0;
    double chamfer = 0;
    /// Candidates whose ICP diverged and fell back to their initialization.
    int fallbacks = 0;
};

/// Normalizes both meshes to the unit box, runs point-to-point similarity ICP
/// from every grid initialization on coarse_samples points, refines the best
/// refine_candidates on all samples and keeps the best F-score (then Chamfer).
AlignResult align(const TriMesh& pred, const TriMesh& gt, const AlignOptions& options = {});

/// Samples both surfaces, maps pred through `transform`, normalizes both by
/// the gt unit-box transform and scores them.
PointSetScore evaluate_geometry(const TriMesh& pred, const TriMesh& gt, const Similarity& transform,
                                std::size_t samples, double threshold, std::uint64_t seed);

/// Rotation angle (radians) of r1^T r2.
double rotation_angle_between(const Mat3& r1, const Mat3& r2);

}  // namespace uvpbr
