// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "moma/align_linear.hpp"
#include "moma/depth.hpp"

namespace moma {

struct LwlrConfig {
  double bandwidth = 100.0;  // pixels
  double epsilon = 1e-6;     // ridge, scaled by the normal-matrix trace
};

/// Per-pixel scale and shift rasters.
struct ScaleShiftField {
  Dims dims;
  std::vector<double> scale;
  std::vector<double> shift;
};

/// Gaussian kernel weight exp(-d^2 / (2 b^2)) / sqrt(2 pi).
double lwlr_weight(double distance, double bandwidth);

/// Weighted least-squares (s, t) at pixel (u, v). Sample k is weighted by
/// lwlr_weight of its Euclidean pixel distance to (u, v). When the 2x2 normal
/// matrix has condition number above 1e12, epsilon * trace is added to its
/// diagonal before solving.
GlobalScaleShift fit_lwlr_at(const SampleSet& samples, const LwlrConfig& cfg,
                             double u, double v);

ScaleShiftField fit_lwlr(const SampleSet& samples, Dims dims,
                         const LwlrConfig& cfg);

DepthMap apply_lwlr(const DepthMap& pred_norm, const ScaleShiftField& field);

}  // namespace moma
