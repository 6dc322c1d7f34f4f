// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/align_lwlr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "moma/error.hpp"
#include "moma/parallel.hpp"

namespace moma {

namespace {

constexpr double kMaxCondition = 1e12;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

struct Design {
  std::vector<double> u, v, zp, zc;
};

Design unpack(const SampleSet& samples) {
  Design d;
  for (const SamplePoint& p : samples.points()) {
    d.u.push_back(p.u);
    d.v.push_back(p.v);
    d.zp.push_back(p.z_p);
    d.zc.push_back(p.z_c);
  }
  return d;
}

void validate(const SampleSet& samples, const LwlrConfig& cfg) {
  if (!(cfg.bandwidth > 0.0) || !std::isfinite(cfg.bandwidth)) {
    fail(ErrorCode::kInvalidArgument, "lwlr: bandwidth must be positive");
  }
  if (!(cfg.epsilon >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "lwlr: epsilon must be >= 0");
  }
  // Same variance guard as the global fit.
  (void)fit_gssa(samples);
}

double condition_2x2(double a, double b, double c) {
  const double tr = a + c;
  const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
  const double hi = 0.5 * (tr + disc);
  const double lo = 0.5 * (tr - disc);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

GlobalScaleShift solve_at(const Design& d, const LwlrConfig& cfg, double u,
                          double v, bool shifted) {
  // Normal matrix [a b; b c] and right-hand side [r0 r1] of the weighted
  // regression z_c ~ s * z_p + t.
  const double two_b2 = 2.0 * cfg.bandwidth * cfg.bandwidth;
  double d2_min = 0.0;
  if (shifted) {
    d2_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d.u.size(); ++k) {
      const double du = d.u[k] - u;
      const double dv = d.v[k] - v;
      d2_min = std::min(d2_min, du * du + dv * dv);
    }
  }
  double a = 0.0, b = 0.0, c = 0.0, r0 = 0.0, r1 = 0.0;
  for (std::size_t k = 0; k < d.u.size(); ++k) {
    const double du = d.u[k] - u;
    const double dv = d.v[k] - v;
    const double w = kInvSqrt2Pi * std::exp(-(du * du + dv * dv - d2_min) / two_b2);
    a += w * d.zp[k] * d.zp[k];
    b += w * d.zp[k];
    c += w;
    r0 += w * d.zp[k] * d.zc[k];
    r1 += w * d.zc[k];
  }
  if (c == 0.0 && !shifted) {
    // Every weight underflowed; a common factor does not change the
    // minimizer, so rescale relative to the nearest sample.
    return solve_at(d, cfg, u, v, true);
  }
  if (condition_2x2(a, b, c) > kMaxCondition) {
    const double ridge = cfg.epsilon * (a + c);
    a += ridge;
    c += ridge;
  }
  const double det = a * c - b * b;
  GlobalScaleShift out;
  out.s = (c * r0 - b * r1) / det;
  out.t = (a * r1 - b * r0) / det;
  if (!std::isfinite(out.s) || !std::isfinite(out.t)) {
    fail(ErrorCode::kDegenerateDesign,
         "lwlr: singular local design at pixel (" + std::to_string(u) + ", " +
             std::to_string(v) + ")");
  }
  return out;
}

}  // namespace

double lwlr_weight(double distance, double bandwidth) {
  return kInvSqrt2Pi * std::exp(-(distance * distance) / (2.0 * bandwidth * bandwidth));
}

GlobalScaleShift fit_lwlr_at(const SampleSet& samples, const LwlrConfig& cfg,
                             double u, double v) {
  validate(samples, cfg);
  return solve_at(unpack(samples), cfg, u, v, false);
}

ScaleShiftField fit_lwlr(const SampleSet& samples, Dims dims,
                         const LwlrConfig& cfg) {
  if (dims.width < 1 || dims.height < 1) {
    fail(ErrorCode::kInvalidArgument, "fit_lwlr: empty target raster");
  }
  validate(samples, cfg);
  const Design d = unpack(samples);
  ScaleShiftField field;
  field.dims = dims;
  field.scale.resize(dims.pixels());
  field.shift.resize(dims.pixels());

  // Rows are independent; failures are collected and rethrown on this thread.
  std::vector<std::string> errors(static_cast<std::size_t>(dims.height));
  parallel_rows(dims.height, [&](int v0, int v1) {
    for (int v = v0; v < v1; ++v) {
      try {
        for (int u = 0; u < dims.width; ++u) {
          const auto p = solve_at(d, cfg, u, v, false);
          const std::size_t i = static_cast<std::size_t>(v) * dims.width + u;
          field.scale[i] = p.s;
          field.shift[i] = p.t;
        }
      } catch (const Error& e) {
        errors[static_cast<std::size_t>(v)] = e.what();
      }
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) fail(ErrorCode::kDegenerateDesign, e);
  }
  return field;
}

DepthMap apply_lwlr(const DepthMap& pred_norm, const ScaleShiftField& field) {
  if (pred_norm.dims() != field.dims) {
    fail(ErrorCode::kDimensionMismatch,
         "apply_lwlr: prediction dimensions differ from the fitted field");
  }
  const auto in = pred_norm.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = is_valid(in[i]) ? field.scale[i] * in[i] + field.shift[i]
                             : kInvalidDepth;
  }
  return DepthMap(pred_norm.width(), pred_norm.height(), std::move(out));
}

}  // namespace moma
