// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "moma/depth.hpp"

namespace moma {

/// Global scale-shift: z = s * z_p + t.
struct GlobalScaleShift {
  double s = 1.0;
  double t = 0.0;
};

/// Closed-form least-squares fit of z_c ~ s * z_p + t over the paired samples.
/// Throws DegenerateDesign when fewer than two points are given or the
/// variance of z_p is below 1e-15, and NonFinite when the sums overflow.
/// Negative s is allowed.
GlobalScaleShift fit_gssa(const SampleSet& samples);

/// Sum of squared residuals of `p` over the samples.
double gssa_cost(const SampleSet& samples, const GlobalScaleShift& p);

DepthMap apply_gssa(const DepthMap& pred_norm, const GlobalScaleShift& p);

}  // namespace moma
