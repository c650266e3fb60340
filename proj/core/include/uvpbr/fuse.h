// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uvpbr/backproject.h"
#include "uvpbr/texel_grid.h"

namespace uvpbr {

/// Max-pooling fusion. Per texel, picks the visible view with the largest
/// n . viewdir (lowest index on ties) and copies its color. Output planes:
/// color (3), winner (1, view index or -1), score (1). A texel is valid iff
/// some view sees it.
TexelGrid fuse_views(std::span<const ViewMapSet> sets);

struct InpaintStats {
    std::size_t filled = 0;      // texels that received a value
    bool used_fallback = false;  // no known texel existed; holes got mid-gray
};

/// Pull-push hole filling of one plane. Texels with `known` set keep their
/// values; texels in `domain` without `known` receive a valid-weighted
/// multiresolution average of known values; others are left untouched.
Image pull_push_fill(const Image& plane, std::span<const std::uint8_t> known, std::span<const std::uint8_t> domain,
                     InpaintStats* stats = nullptr);

/// Fills every `domain` texel that is not valid in `grid`, for each listed
/// plane. The result is valid exactly on `domain` (plus previously valid
/// texels).
TexelGrid pull_push_inpaint(const TexelGrid& grid, std::span<const std::uint8_t> domain,
                            const std::vector<std::string>& planes = {"color"}, InpaintStats* stats = nullptr);

}  // namespace uvpbr
