// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/align_linear.hpp"

#include <cmath>
#include <vector>

#include "moma/error.hpp"
#include "moma/parallel.hpp"

namespace moma {

GlobalScaleShift fit_gssa(const SampleSet& samples) {
  if (!samples.all_paired()) {
    fail(ErrorCode::kInvalidArgument, "fit_gssa: samples are not paired");
  }
  const std::size_t n = samples.size();
  if (n < 2) fail(ErrorCode::kDegenerateDesign, "fit_gssa: need at least 2 samples");

  // Centered normal equations: better conditioned than raw sums when z_p
  // carries a large offset.
  double mean_p = 0.0;
  double mean_c = 0.0;
  for (const SamplePoint& q : samples.points()) {
    mean_p += q.z_p;
    mean_c += q.z_c;
  }
  mean_p /= static_cast<double>(n);
  mean_c /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (const SamplePoint& q : samples.points()) {
    const double dp = q.z_p - mean_p;
    sxx += dp * dp;
    sxy += dp * (q.z_c - mean_c);
  }
  if (sxx / static_cast<double>(n) < 1e-15) {
    fail(ErrorCode::kDegenerateDesign, "fit_gssa: predicted depths have no variance");
  }
  GlobalScaleShift p;
  p.s = sxy / sxx;
  p.t = mean_c - p.s * mean_p;
  if (!std::isfinite(p.s) || !std::isfinite(p.t)) {
    fail(ErrorCode::kNonFinite, "fit_gssa: solution is not finite");
  }
  return p;
}

double gssa_cost(const SampleSet& samples, const GlobalScaleShift& p) {
  double cost = 0.0;
  for (const SamplePoint& q : samples.points()) {
    const double r = q.z_c - (p.s * q.z_p + p.t);
    cost += r * r;
  }
  return cost;
}

DepthMap apply_gssa(const DepthMap& pred_norm, const GlobalScaleShift& p) {
  const auto in = pred_norm.data();
  std::vector<double> out(in.size());
  const int w = pred_norm.width();
  parallel_rows(pred_norm.height(), [&](int v0, int v1) {
    for (std::size_t i = static_cast<std::size_t>(v0) * w;
         i < static_cast<std::size_t>(v1) * w; ++i) {
      out[i] = is_valid(in[i]) ? p.s * in[i] + p.t : kInvalidDepth;
    }
  });
  return DepthMap(pred_norm.width(), pred_norm.height(), std::move(out));
}

}  // namespace moma
