// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include "uvpbr/fuse.h"

#include "uvpbr/error.h"
#include "uvpbr/parallel.h"

namespace uvpbr {

TexelGrid fuse_views(std::span<const ViewMapSet> sets) {
    if (sets.empty()) throw PreconditionError("fuse_views: at least one view map set is required");
    const int size = sets.front().maps.size();
    for (const ViewMapSet& s : sets)
        if (s.maps.size() != size) throw PreconditionError("fuse_views: view map sets differ in size");

    TexelGrid out(size);
    out.add_plane("color", 3);
    out.add_plane("winner", 1);
    out.add_plane("score", 1);
    parallel_for(out.texel_count(), [&](std::size_t i) {
        int best = -1;
        double best_score = 0;
        for (std::size_t v = 0; v < sets.size(); ++v) {
            if (!sets[v].visible(i)) continue;
            double score = dot(sets[v].maps.rgb(ViewMapSet::kNormal, i), sets[v].maps.rgb(ViewMapSet::kViewdir, i));
            if (best < 0 || score > best_score) {
                best = static_cast<int>(v);
                best_score = score;
            }
        }
        out.set_scalar("winner", i, best);
        if (best < 0) return;
        out.set_valid(i, true);
        out.set_rgb("color", i, sets[best].maps.rgb(ViewMapSet::kColor, i));
        out.set_scalar("score", i, best_score);
    });
    return out;
}

Image pull_push_fill(const Image& plane, std::span<const std::uint8_t> known, std::span<const std::uint8_t> domain,
                     InpaintStats* stats) {
    const int w0 = plane.width(), h0 = plane.height(), ch = plane.channels();
    const std::size_t n0 = plane.pixel_count();
    if (known.size() != n0 || domain.size() != n0)
        throw PreconditionError("pull_push_fill: mask size does not match the plane");

    struct Level {
        int w, h;
        std::vector<double> value;   // weighted average of known texels below
        std::vector<double> weight;  // in [0, 1]
    };
    std::vector<Level> levels;
    Level base{w0, h0, std::vector<double>(n0 * ch, 0.0), std::vector<double>(n0, 0.0)};
    bool any_known = false;
    for (std::size_t i = 0; i < n0; ++i) {
        if (!known[i]) continue;
        any_known = true;
        base.weight[i] = 1.0;
        for (int c = 0; c < ch; ++c) base.value[i * ch + c] = plane.data()[i * ch + c];
    }

    Image out = plane;
    std::size_t holes = 0;
    for (std::size_t i = 0; i < n0; ++i) holes += (domain[i] && !known[i]) ? 1 : 0;
    if (stats) *stats = {};
    if (holes == 0) return out;
    if (!any_known) {
        for (std::size_t i = 0; i < n0; ++i)
            if (domain[i])
                for (int c = 0; c < ch; ++c) out.data()[i * ch + c] = 0.5f;
        if (stats) *stats = {holes, true};
        return out;
    }

    // Pull: valid-weighted 2x2 averages down to a single texel.
    levels.push_back(std::move(base));
    while (levels.back().w > 1 || levels.back().h > 1) {
        const Level& fine = levels.back();
        Level coarse{(fine.w + 1) / 2, (fine.h + 1) / 2, {}, {}};
        coarse.value.assign(static_cast<std::size_t>(coarse.w) * coarse.h * ch, 0.0);
        coarse.weight.assign(static_cast<std::size_t>(coarse.w) * coarse.h, 0.0);
        parallel_for(static_cast<std::size_t>(coarse.h), [&](std::size_t yy) {
            int y = static_cast<int>(yy);
            for (int x = 0; x < coarse.w; ++x) {
                double wsum = 0;
                std::vector<double> acc(ch, 0.0);
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        int fx = 2 * x + dx, fy = 2 * y + dy;
                        if (fx >= fine.w || fy >= fine.h) continue;
                        std::size_t j = static_cast<std::size_t>(fy) * fine.w + fx;
                        double wj = fine.weight[j];
                        if (wj <= 0) continue;
                        wsum += wj;
                        for (int c = 0; c < ch; ++c) acc[c] += wj * fine.value[j * ch + c];
                    }
                std::size_t k = static_cast<std::size_t>(y) * coarse.w + x;
                if (wsum > 0) {
                    for (int c = 0; c < ch; ++c) coarse.value[k * ch + c] = acc[c] / wsum;
                    coarse.weight[k] = std::min(1.0, wsum);
                }
            }
        });
        levels.push_back(std::move(coarse));
    }

    // Push: blend each level's partial estimate with its parent.
    for (std::size_t l = levels.size() - 1; l-- > 0;) {
        Level& fine = levels[l];
        const Level& coarse = levels[l + 1];
        parallel_for(static_cast<std::size_t>(fine.h), [&](std::size_t yy) {
            int y = static_cast<int>(yy);
            for (int x = 0; x < fine.w; ++x) {
                std::size_t j = static_cast<std::size_t>(y) * fine.w + x;
                double wj = fine.weight[j];
                if (wj >= 1.0) continue;
                std::size_t k = static_cast<std::size_t>(y / 2) * coarse.w + x / 2;
                for (int c = 0; c < ch; ++c)
                    fine.value[j * ch + c] = wj * fine.value[j * ch + c] + (1.0 - wj) * coarse.value[k * ch + c];
                fine.weight[j] = 1.0;
            }
        });
    }

    const Level& filled = levels.front();
    for (std::size_t i = 0; i < n0; ++i) {
        if (!domain[i] || known[i]) continue;
        for (int c = 0; c < ch; ++c) out.data()[i * ch + c] = static_cast<float>(filled.value[i * ch + c]);
    }
    if (stats) *stats = {holes, false};
    return out;
}

TexelGrid pull_push_inpaint(const TexelGrid& grid, std::span<const std::uint8_t> domain,
                            const std::vector<std::string>& planes, InpaintStats* stats) {
    if (domain.size() != grid.texel_count())
        throw PreconditionError("pull_push_inpaint: domain mask size does not match the grid");
    TexelGrid out = grid;
    const auto& known = grid.valid_mask();
    InpaintStats total;
    for (const std::string& name : planes) {
        if (!grid.has_plane(name)) throw PreconditionError("pull_push_inpaint: grid lacks the '" + name + "' plane");
        InpaintStats s;
        out.set_plane(name, pull_push_fill(grid.plane(name), known, domain, &s));
        total.filled = std::max(total.filled, s.filled);
        total.used_fallback = total.used_fallback || s.used_fallback;
    }
    for (std::size_t i = 0; i < domain.size(); ++i)
        if (domain[i]) out.set_valid(i, true);
    if (stats) *stats = total;
    return out;
}

}  // namespace uvpbr
