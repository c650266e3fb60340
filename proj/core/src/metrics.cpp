// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/metrics.h"

#include <cmath>
#include <iterator>
#include <limits>

#include <Eigen/Geometry>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "uvpbr/error.h"
#include "uvpbr/parallel.h"

namespace uvpbr {

void LossWeights::validate() const {
    for (double v : {lambda_z, lambda_M, lambda_n, lambda_1, lambda_2, lambda_3})
        if (!(v >= 0)) throw PreconditionError("loss weights must be non-negative");
    if (n_views < 1) throw PreconditionError("loss weights: n_views must be >= 1");
}

void to_json(nlohmann::json& j, const LossWeights& w) {
    j = {{"lambda_z", w.lambda_z}, {"lambda_M", w.lambda_M}, {"lambda_n", w.lambda_n}, {"lambda_1", w.lambda_1},
         {"lambda_2", w.lambda_2}, {"lambda_3", w.lambda_3}, {"n_views", w.n_views}};
}

void from_json(const nlohmann::json& j, LossWeights& w) {
    LossWeights d;
    w.lambda_z = j.value("lambda_z", d.lambda_z);
    w.lambda_M = j.value("lambda_M", d.lambda_M);
    w.lambda_n = j.value("lambda_n", d.lambda_n);
    w.lambda_1 = j.value("lambda_1", d.lambda_1);
    w.lambda_2 = j.value("lambda_2", d.lambda_2);
    w.lambda_3 = j.value("lambda_3", d.lambda_3);
    w.n_views = j.value("n_views", d.n_views);
}

namespace {

void require_same_shape(const Image& a, const Image& b, const char* who) {
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
        throw PreconditionError(std::string(who) + ": image dimensions differ");
}

}  // namespace

GeometryLoss loss_geo(const GeometryMaps& pred, const GeometryMaps& gt, const LossWeights& w) {
    require_same_shape(pred.depth, gt.depth, "loss_geo");
    require_same_shape(pred.mask, gt.mask, "loss_geo");
    require_same_shape(pred.normal, gt.normal, "loss_geo");
    if (pred.mask.width() != pred.depth.width() || pred.mask.height() != pred.depth.height() ||
        pred.normal.width() != pred.depth.width() || pred.normal.height() != pred.depth.height())
        throw PreconditionError("loss_geo: depth, mask and normal maps differ in size");

    const int width = gt.depth.width(), height = gt.depth.height();
    double depth_sum = 0, mask_sum = 0, angle_sum = 0;
    std::size_t both = 0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double mp = pred.mask.at(x, y, 0), mg = gt.mask.at(x, y, 0);
            mask_sum += (mp - mg) * (mp - mg);
            if (mp < 0.5 || mg < 0.5) continue;
            ++both;
            depth_sum += std::abs(static_cast<double>(gt.depth.at(x, y, 0)) - pred.depth.at(x, y, 0));
            Vec3 a = normalize(pred.normal.rgb(x, y)), b = normalize(gt.normal.rgb(x, y));
            angle_sum += std::atan2(length(cross(a, b)), dot(a, b));
        }
    GeometryLoss loss;
    loss.mask = w.lambda_M * mask_sum / (static_cast<double>(width) * height);
    if (both) {
        loss.depth = w.lambda_z * depth_sum / both;
        loss.normal = w.lambda_n * angle_sum / both;
    }
    return loss;
}

GeometryLoss loss_geo_views(std::span<const GeometryMaps> pred, std::span<const GeometryMaps> gt,
                            const LossWeights& w) {
    if (pred.size() != gt.size() || pred.empty())
        throw PreconditionError("loss_geo_views: need equally many predicted and reference views");
    GeometryLoss sum;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        GeometryLoss l = loss_geo(pred[i], gt[i], w);
        sum.depth += l.depth;
        sum.mask += l.mask;
        sum.normal += l.normal;
    }
    double n = static_cast<double>(pred.size());
    return {sum.depth / n, sum.mask / n, sum.normal / n, 0.0};
}

double mse(const Image& x, const Image& y) {
    require_same_shape(x, y, "mse");
    if (x.empty()) throw PreconditionError("mse: empty image");
    double sum = 0;
    auto a = x.data(), b = y.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a[i]) - b[i];
        sum += d * d;
    }
    return sum / a.size();
}

double psnr(const Image& x, const Image& y) {
    double m = mse(x, y);
    if (m < 1e-10) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / m));
}

double ssim(const Image& x, const Image& y) {
    require_same_shape(x, y, "ssim");
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5, kC1 = 0.01 * 0.01, kC2 = 0.03 * 0.03;
    if (x.width() < kWin || x.height() < kWin) throw PreconditionError("ssim: image smaller than the 11x11 window");

    std::array<double, kWin> g{};
    double gsum = 0;
    for (int k = 0; k < kWin; ++k) {
        double d = k - kWin / 2;
        g[k] = std::exp(-d * d / (2 * kSigma * kSigma));
        gsum += g[k];
    }
    for (double& v : g) v /= gsum;

    const int w = x.width(), h = x.height();
    const int ow = w - kWin + 1, oh = h - kWin + 1;
    const int channels = std::min(3, x.channels());
    double total = 0;
    for (int c = 0; c < channels; ++c) {
        // Five moments, filtered horizontally then vertically.
        std::array<std::vector<double>, 5> rows;
        for (auto& r : rows) r.assign(static_cast<std::size_t>(ow) * h, 0.0);
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                double m[5] = {0, 0, 0, 0, 0};
                for (int k = 0; k < kWin; ++k) {
                    double a = x.at(xx + k, yy, c), b = y.at(xx + k, yy, c);
                    m[0] += g[k] * a;
                    m[1] += g[k] * b;
                    m[2] += g[k] * a * a;
                    m[3] += g[k] * b * b;
                    m[4] += g[k] * a * b;
                }
                for (int q = 0; q < 5; ++q) rows[q][static_cast<std::size_t>(yy) * ow + xx] = m[q];
            }
        double sum = 0;
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                double m[5] = {0, 0, 0, 0, 0};
                for (int k = 0; k < kWin; ++k)
                    for (int q = 0; q < 5; ++q) m[q] += g[k] * rows[q][static_cast<std::size_t>(yy + k) * ow + xx];
                double mx = m[0], my = m[1];
                double vx = m[2] - mx * mx, vy = m[3] - my * my, cxy = m[4] - mx * my;
                sum += ((2 * mx * my + kC1) * (2 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
            }
        total += sum / (static_cast<double>(ow) * oh);
    }
    return total / channels;
}

ImageLoss loss_l0(const Image& x, const Image& y, const LossWeights& w) {
    ImageLoss loss;
    loss.mse = w.lambda_1 * mse(x, y);
    loss.ssim = w.lambda_3 * (1.0 - ssim(x, y));
    return loss;
}

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

struct PointIndex::Impl {
    using Point = bg::model::point<double, 3, bg::cs::cartesian>;
    using Value = std::pair<Point, std::size_t>;
    bgi::rtree<Value, bgi::rstar<16>> tree;
};

PointIndex::PointIndex(std::span<const Vec3> points) : impl_(std::make_unique<Impl>()), count_(points.size()) {
    if (points.empty()) throw PreconditionError("PointIndex: empty point set");
    std::vector<Impl::Value> values;
    values.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        values.emplace_back(Impl::Point(points[i].x, points[i].y, points[i].z), i);
    impl_->tree = decltype(impl_->tree)(values.begin(), values.end());
}

PointIndex::~PointIndex() = default;
PointIndex::PointIndex(PointIndex&&) noexcept = default;
PointIndex& PointIndex::operator=(PointIndex&&) noexcept = default;

std::pair<std::size_t, double> PointIndex::nearest(const Vec3& q) const {
    Impl::Point p(q.x, q.y, q.z);
    Impl::Value hit;
    impl_->tree.query(bgi::nearest(p, 1), &hit);
    return {hit.second, bg::distance(p, hit.first)};
}

namespace {

std::vector<double> nn_distances(std::span<const Vec3> queries, const PointIndex& index) {
    std::vector<double> d(queries.size());
    parallel_for(queries.size(), [&](std::size_t i) { d[i] = index.nearest(queries[i]).second; });
    return d;
}

PointSetScore score_from_distances(const std::vector<double>& ab, const std::vector<double>& ba, double threshold) {
    double sum_ab = 0, sum_ba = 0;
    std::size_t hit_ab = 0, hit_ba = 0;
    for (double d : ab) {
        sum_ab += d;
        hit_ab += d < threshold ? 1 : 0;
    }
    for (double d : ba) {
        sum_ba += d;
        hit_ba += d < threshold ? 1 : 0;
    }
    PointSetScore s;
    double mean_ab = sum_ab / ab.size(), mean_ba = sum_ba / ba.size();
    // Sorted operands keep the result exactly symmetric.
    s.chamfer = 0.5 * (std::min(mean_ab, mean_ba) + std::max(mean_ab, mean_ba));
    s.precision = static_cast<double>(hit_ab) / ab.size();
    s.recall = static_cast<double>(hit_ba) / ba.size();
    s.fscore = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace

PointSetScore chamfer_fscore(std::span<const Vec3> a, std::span<const Vec3> b, double threshold) {
    if (a.empty() || b.empty()) throw PreconditionError("chamfer_fscore: empty point set");
    PointIndex ia(a), ib(b);
    return score_from_distances(nn_distances(a, ib), nn_distances(b, ia), threshold);
}

Similarity normalize_to_unit_box(const TriMesh& mesh) {
    Bounds3 box = mesh.bounds();
    if (box.empty()) throw PreconditionError("normalize_to_unit_box: empty mesh");
    double extent = max_component(box.extent());
    if (!(extent > 0)) throw PreconditionError("normalize_to_unit_box: degenerate bounding box");
    double s = 2.0 / extent;
    return {Mat3::identity(), s, box.center() * -s};
}

std::vector<AlignInit> alignment_initializations(const AlignOptions& options) {
    std::vector<AlignInit> inits;
    for (int i = 0; i < options.yaw_steps; ++i)
        for (int j = 0; j < options.scale_steps; ++j) {
            double t = options.scale_steps > 1 ? static_cast<double>(j) / (options.scale_steps - 1) : 0.0;
            inits.push_back({2.0 * kPi * i / options.yaw_steps,
                             options.scale_min + t * (options.scale_max - options.scale_min)});
        }
    return inits;
}

double rotation_angle_between(const Mat3& r1, const Mat3& r2) {
    Mat3 r = r1.transposed() * r2;
    double c = (r(0, 0) + r(1, 1) + r(2, 2) - 1.0) / 2.0;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

namespace {

std::vector<Vec3> apply_all(const Similarity& t, std::span<const Vec3> pts) {
    std::vector<Vec3> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = t.apply(pts[i]);
    return out;
}

double mean_nn(std::span<const Vec3> pts, const PointIndex& index, std::vector<std::size_t>* matches) {
    std::vector<double> d(pts.size());
    if (matches) matches->resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        auto [j, dist] = index.nearest(pts[i]);
        d[i] = dist;
        if (matches) (*matches)[i] = j;
    });
    double sum = 0;
    for (double v : d) sum += v;
    return sum / pts.size();
}

Similarity umeyama_fit(std::span<const Vec3> src, std::span<const Vec3> dst, const std::vector<std::size_t>& match) {
    Eigen::Matrix3Xd a(3, src.size()), b(3, src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Vec3& p = src[i];
        const Vec3& q = dst[match[i]];
        a.col(static_cast<Eigen::Index>(i)) << p.x, p.y, p.z;
        b.col(static_cast<Eigen::Index>(i)) << q.x, q.y, q.z;
    }
    Eigen::Matrix4d m = Eigen::umeyama(a, b, true);
    Similarity t;
    t.scale = m.block<3, 1>(0, 0).norm();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t.rotation(r, c) = m(r, c) / t.scale;
    t.translation = {m(0, 3), m(1, 3), m(2, 3)};
    return t;
}

}  // namespace

namespace {

struct IcpRun {
    Similarity transform;
    bool fallback = false;
    PointSetScore score;
};

// Point-to-point similarity ICP from `start`, scored on the same point sets.
IcpRun run_icp(const Similarity& start, std::span<const Vec3> src, std::span<const Vec3> dst,
               const PointIndex& dst_index, const AlignOptions& options) {
    IcpRun run{start};
    std::vector<std::size_t> match;
    const double initial_err = mean_nn(apply_all(start, src), dst_index, &match);
    double err = initial_err;
    for (int it = 0; it < options.icp_iterations; ++it) {
        Similarity next = umeyama_fit(src, dst, match);
        double next_err = mean_nn(apply_all(next, src), dst_index, &match);
        run.transform = next;
        bool converged = std::abs(err - next_err) <= 1e-7 * std::max(err, 1e-12);
        err = next_err;
        if (converged) break;
    }
    if (!std::isfinite(err) || err > initial_err || !(run.transform.scale > 0)) {
        run.transform = start;
        run.fallback = true;
    }
    std::vector<Vec3> moved = apply_all(run.transform, src);
    PointIndex moved_index(moved);
    run.score =
        score_from_distances(nn_distances(moved, dst_index), nn_distances(dst, moved_index), options.threshold);
    return run;
}

bool better(const PointSetScore& a, const PointSetScore& b) {
    return a.fscore > b.fscore || (a.fscore == b.fscore && a.chamfer < b.chamfer);
}

}  // namespace

AlignResult align(const TriMesh& pred, const TriMesh& gt, const AlignOptions& options) {
    if (pred.empty() || gt.empty()) throw PreconditionError("align: both meshes must be non-empty");
    if (options.samples == 0 || options.yaw_steps < 1 || options.scale_steps < 1)
        throw PreconditionError("align: invalid search options");
    Similarity n_pred = normalize_to_unit_box(pred), n_gt = normalize_to_unit_box(gt);
    std::vector<Vec3> src = sample_surface(transformed(pred, n_pred), options.samples, options.seed);
    std::vector<Vec3> dst = sample_surface(transformed(gt, n_gt), options.samples, options.seed);
    PointIndex dst_index(dst);

    // Every initialization runs on a prefix subset (samples are i.i.d.), then
    // the best few are refined on the full sets.
    const std::size_t coarse_n = std::clamp<std::size_t>(options.coarse_samples, 1, options.samples);
    std::span<const Vec3> src_coarse(src.data(), coarse_n), dst_coarse(dst.data(), coarse_n);
    PointIndex coarse_index(dst_coarse);
    const std::vector<AlignInit> inits = alignment_initializations(options);
    std::vector<IcpRun> coarse;
    coarse.reserve(inits.size());
    AlignResult best;
    for (const AlignInit& init : inits) {
        coarse.push_back(run_icp({Mat3::rotation_z(init.yaw), init.scale, {}}, src_coarse, dst_coarse, coarse_index,
                                 options));
        best.fallbacks += coarse.back().fallback ? 1 : 0;
    }
    std::vector<std::size_t> order(inits.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(coarse[a].score, coarse[b].score); });
    const std::size_t refine = std::clamp<std::size_t>(options.refine_candidates, 1, order.size());

    bool have_best = false;
    for (std::size_t r = 0; r < refine; ++r) {
        std::size_t k = order[r];
        IcpRun run = run_icp(coarse[k].transform, src, dst, dst_index, options);
        if (!have_best || better(run.score, PointSetScore{.chamfer = best.chamfer, .fscore = best.fscore})) {
            have_best = true;
            best.transform = run.transform;
            best.init = inits[k];
            best.fscore = run.score.fscore;
            best.chamfer = run.score.chamfer;
        }
    }
    best.transform = n_gt.inverse().compose(best.transform.compose(n_pred));
    return best;
}

PointSetScore evaluate_geometry(const TriMesh& pred, const TriMesh& gt, const Similarity& transform,
                                std::size_t samples, double threshold, std::uint64_t seed) {
    Similarity n_gt = normalize_to_unit_box(gt);
    std::vector<Vec3> a = sample_surface(transformed(pred, n_gt.compose(transform)), samples, seed);
    std::vector<Vec3> b = sample_surface(transformed(gt, n_gt), samples, seed);
    return chamfer_fscore(a, b, threshold);
}

}  // namespace uvpbr
