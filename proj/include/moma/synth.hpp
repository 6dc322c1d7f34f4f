// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moma/align_ssra.hpp"
#include "moma/depth.hpp"

namespace moma {

using Vec3 = std::array<double, 3>;

struct PinholeCamera {
  int width = 320;
  int height = 240;
  double fx = 300.0;
  double fy = 300.0;
  double cx = 160.0;
  double cy = 120.0;
};

/// Points X with dot(normal, X) == offset.
struct Plane {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 1.0;
};

struct Box {
  Vec3 center{};
  Vec3 half_extents{};
};

struct SceneSpec {
  PinholeCamera camera;
  std::optional<Plane> plane;
  std::vector<Box> boxes;
};

struct PerturbationSpec {
  ThetaParams theta_star;
  double gt_noise_sigma = 0.0;    // m, added to the paired ground truth
  double pred_noise_sigma = 0.0;  // prediction units, added before jitter
  double jitter_a = 1.0;
  double jitter_b = 0.0;
};

/// Camera looking obliquely at a table roughly 1.2 to 2.4 m away, with three
/// boxes on it. Depths stay above 1 m so shifts in [-1, 1] keep predictions
/// positive.
SceneSpec tabletop_scene(int width = 320, int height = 240);

/// z-depth (distance along the optical axis) of the nearest surface through
/// each pixel center; pixels that hit nothing are invalid.
DepthMap render_scene(const SceneSpec& spec);

/// The per-pixel gain g with forward_model(u, v, z, theta) == z * g + t3.
double ssra_gain(double u, double v, const ThetaParams& theta);

struct Perturbed {
  DepthMap pred;       // pseudo-prediction
  DepthMap gt_paired;  // ground truth with gt_noise_sigma applied
};

/// Inverts the forward model: pred = (gt - t3) / g(u, v; theta_star), then
/// adds prediction noise and the affine jitter a * z + b. With zero noise and
/// identity jitter, forward_model(u, v, pred, theta_star) reproduces gt.
Perturbed perturb(const DepthMap& gt, const PerturbationSpec& pspec,
                  std::uint64_t seed);

struct SynthConfig {
  SceneSpec scene;
  PerturbationSpec perturbation;
};

/// Key-value document with dotted section names, e.g.
///
///   preset = tabletop
///   camera.width = 320
///   plane.normal = 0 0.8 1
///   box.0.center = 0 0.05 1.5
///   theta.phi = 0.2
///   perturb.gt_noise_sigma = 0.005
///
/// `#` starts a comment. Unset theta.cxp/cyp/fp default to the image center
/// and max(width, height).
SynthConfig parse_synth_config(std::string_view text);
SynthConfig load_synth_config(const std::string& path);
std::string to_config_text(const SynthConfig& config);

}  // namespace moma
