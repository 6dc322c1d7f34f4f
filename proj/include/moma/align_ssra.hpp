// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "moma/depth.hpp"

namespace moma {

/// Scale-shift-rotation alignment parameters. The prediction is treated as a
/// depth map from a pseudo pinhole sensor with intrinsics (cxp, cyp, fp);
/// each back-projected point is rotated, scaled and shifted, and only its
/// resulting depth is kept:
///
///   x = z (u - cxp) / fp,  y = z (v - cyp) / fp
///   F = s (-x sin(phi) + y sin(theta) cos(phi) + z cos(theta) cos(phi)) + t3
struct ThetaParams {
  double s = 1.0;
  double theta = 0.0;  // radians
  double phi = 0.0;    // radians
  double t3 = 0.0;     // meters
  double cxp = 0.0;    // pixels
  double cyp = 0.0;    // pixels
  double fp = 1.0;     // pixels, never zero

  static constexpr std::size_t kCount = 7;
  std::array<double, kCount> to_array() const {
    return {s, theta, phi, t3, cxp, cyp, fp};
  }
  static ThetaParams from_array(const std::array<double, kCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

/// Indices into ThetaParams::to_array(), e.g. for SolverConfig::frozen.
enum ThetaIndex : std::size_t {
  kScale = 0,
  kTheta,
  kPhi,
  kT3,
  kCxp,
  kCyp,
  kFp,
};

struct SolverConfig {
  int max_iter = 200;
  double cost_tol = 1e-12;  // relative cost decrease
  double step_tol = 1e-12;  // step norm relative to parameter norm
  double init_damping = 1e-3;
  /// Frozen parameters keep their initial value.
  std::array<bool, ThetaParams::kCount> frozen{};
};

struct SolverReport {
  double init_cost = 0.0;   // mean squared residual, m^2
  double final_cost = 0.0;  // mean squared residual, m^2
  int iterations = 0;
  bool converged = false;
  /// Cost after initialization and after every accepted step.
  std::vector<double> cost_history;
};

struct PseudoPoint3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

PseudoPoint3D back_project(double u, double v, double z_p, double cxp,
                           double cyp, double fp);

double forward_model(double u, double v, double z_p, const ThetaParams& theta);

/// Analytic partial derivatives of forward_model, ordered as ThetaIndex.
std::array<double, ThetaParams::kCount> forward_jacobian(
    double u, double v, double z_p, const ThetaParams& theta);

/// Mean squared depth residual of `theta` over the paired samples.
double ssra_cost(const SampleSet& samples, const ThetaParams& theta);

struct SsraFit {
  ThetaParams theta;
  SolverReport report;
};

/// Damped Gauss-Newton fit of ThetaParams to normalized samples. Starts from
/// the global scale-shift solution with no rotation and pseudo intrinsics
/// (width/2, height/2, max(width, height)). Samples stacked from several
/// scenes at the same pose are fitted jointly.
SsraFit fit_ssra(const SampleSet& samples, const SolverConfig& cfg, Dims dims);

/// Same, from an explicit starting point.
SsraFit fit_ssra_from(const SampleSet& samples, const SolverConfig& cfg,
                      const ThetaParams& init);

DepthMap apply_ssra(const DepthMap& pred_norm, const ThetaParams& theta);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace moma
