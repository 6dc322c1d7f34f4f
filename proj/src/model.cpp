// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/model.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <vector>

#include "moma/error.hpp"

namespace moma {

std::string_view to_string(AlignMethod method) noexcept {
  switch (method) {
    case AlignMethod::kGssa: return "gssa";
    case AlignMethod::kLwlr: return "lwlr";
    case AlignMethod::kSsra: return "ssra";
  }
  return "ssra";
}

std::optional<AlignMethod> parse_align_method(std::string_view text) {
  if (text == "gssa") return AlignMethod::kGssa;
  if (text == "lwlr") return AlignMethod::kLwlr;
  if (text == "ssra") return AlignMethod::kSsra;
  return std::nullopt;
}

AlignMethod AlignmentModel::method() const noexcept {
  switch (payload.index()) {
    case 0: return AlignMethod::kGssa;
    case 1: return AlignMethod::kLwlr;
    default: return AlignMethod::kSsra;
  }
}

std::string current_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double model_depth_at(const AlignmentModel& model, const SamplePoint& p) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GlobalScaleShift>) {
          return m.s * p.z_p + m.t;
        } else if constexpr (std::is_same_v<T, LwlrPayload>) {
          const auto st = fit_lwlr_at(m.samples, m.config, p.u, p.v);
          return st.s * p.z_p + st.t;
        } else {
          return forward_model(p.u, p.v, p.z_p, m);
        }
      },
      model.payload);
}

Calibration calibrate_samples(const SampleSet& samples, Dims dims,
                              const CalibrationOptions& opts) {
  if (!samples.all_paired()) {
    fail(ErrorCode::kInvalidArgument, "calibrate: samples are not paired");
  }
  AlignmentModel model;
  model.norm = opts.norm;
  model.calib_dims = dims;
  model.created_at = current_timestamp();
  model.sample_count = samples.size();
  switch (opts.method) {
    case AlignMethod::kGssa:
      model.payload = fit_gssa(samples);
      break;
    case AlignMethod::kLwlr:
      // Validates the configuration and the design up front.
      (void)fit_lwlr_at(samples, opts.lwlr, 0.0, 0.0);
      model.payload = LwlrPayload{opts.lwlr, samples};
      break;
    case AlignMethod::kSsra: {
      SsraFit fit = fit_ssra(samples, opts.solver, dims);
      model.payload = fit.theta;
      model.report = std::move(fit.report);
      break;
    }
  }

  ResidualStats stats;
  double sq = 0.0;
  for (const SamplePoint& p : samples.points()) {
    const double r = std::abs(p.z_c - model_depth_at(model, p));
    stats.mean_abs += r;
    sq += r * r;
    stats.max_abs = std::max(stats.max_abs, r);
  }
  const double n = static_cast<double>(samples.size());
  stats.mean_abs /= n;
  stats.rms = std::sqrt(sq / n);
  return Calibration{std::move(model), samples, stats};
}

Calibration calibrate(std::span<const DepthMap> gts,
                      std::span<const DepthMap> preds, const Mask* mask,
                      const CalibrationOptions& opts, const Mask* norm_mask) {
  if (gts.empty() || gts.size() != preds.size()) {
    fail(ErrorCode::kInvalidArgument,
         "calibrate: need matching ground-truth and prediction lists");
  }
  const Dims dims = preds.front().dims();
  std::vector<SampleSet> per_scene;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (gts[i].dims() != dims || preds[i].dims() != dims) {
      fail(ErrorCode::kDimensionMismatch,
           "calibrate: all maps must share the calibration dimensions");
    }
    const SampleSet raw = sample_points(gts[i], mask, opts.n, opts.seed + i);
    const auto [normed, stats] = normalize(preds[i], opts.norm, norm_mask);
    per_scene.push_back(pair_predictions(raw, normed));
  }
  return calibrate_samples(SampleSet::stack(per_scene), dims, opts);
}

DepthMap apply_model(const AlignmentModel& model, const DepthMap& raw_pred,
                     const Mask* norm_mask) {
  const AlignMethod method = model.method();
  if (method != AlignMethod::kGssa && raw_pred.dims() != model.calib_dims) {
    fail(ErrorCode::kDimensionMismatch,
         "apply: prediction is " + std::to_string(raw_pred.width()) + "x" +
             std::to_string(raw_pred.height()) + " but the model was calibrated at " +
             std::to_string(model.calib_dims.width) + "x" +
             std::to_string(model.calib_dims.height));
  }
  const auto [normed, stats] = normalize(raw_pred, model.norm, norm_mask);
  return std::visit(
      [&](const auto& m) -> DepthMap {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GlobalScaleShift>) {
          return apply_gssa(normed, m);
        } else if constexpr (std::is_same_v<T, LwlrPayload>) {
          return apply_lwlr(normed, fit_lwlr(m.samples, normed.dims(), m.config));
        } else {
          return apply_ssra(normed, m);
        }
      },
      model.payload);
}

}  // namespace moma
