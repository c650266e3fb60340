// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace uvpbr {

/// Caps the worker count used by parallel_for. 0 restores the hardware default.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Iterations are split into contiguous blocks,
/// one per worker; bodies must write disjoint memory. Results never depend on
/// the worker count as long as that contract holds.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace uvpbr
