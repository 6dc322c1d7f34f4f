// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "moma/align_linear.hpp"
#include "moma/align_lwlr.hpp"
#include "moma/align_ssra.hpp"
#include "moma/depth.hpp"
#include "moma/normalize.hpp"

namespace moma {

enum class AlignMethod { kGssa, kLwlr, kSsra };

std::string_view to_string(AlignMethod method) noexcept;
std::optional<AlignMethod> parse_align_method(std::string_view text);

/// LWLR keeps its (normalized) samples; the field is rebuilt at apply time.
struct LwlrPayload {
  LwlrConfig config;
  SampleSet samples;
};

using ModelPayload = std::variant<GlobalScaleShift, LwlrPayload, ThetaParams>;

/// A persisted calibration for one fixed camera pose.
struct AlignmentModel {
  NormalizationMethod norm = NormalizationMethod::kMinMax;
  Dims calib_dims;
  std::string created_at;  // ISO-8601 UTC
  std::size_t sample_count = 0;
  ModelPayload payload;
  std::optional<SolverReport> report;  // ssra only

  AlignMethod method() const noexcept;
};

struct CalibrationOptions {
  AlignMethod method = AlignMethod::kSsra;
  NormalizationMethod norm = NormalizationMethod::kMinMax;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  LwlrConfig lwlr;
  SolverConfig solver;
};

struct ResidualStats {
  double mean_abs = 0.0;
  double rms = 0.0;
  double max_abs = 0.0;
};

struct Calibration {
  AlignmentModel model;
  SampleSet samples;  // normalized, paired, stacked over all scenes
  ResidualStats residuals;
};

/// Fits the chosen method to already normalized, paired samples.
Calibration calibrate_samples(const SampleSet& samples, Dims dims,
                              const CalibrationOptions& opts);

/// One-shot calibration from (ground truth, raw prediction) pairs taken at
/// the same pose. Scene i is sampled with seed + i, its prediction is
/// normalized over the whole image (or `norm_mask`), and the paired samples
/// of every scene are fitted jointly.
Calibration calibrate(std::span<const DepthMap> gts,
                      std::span<const DepthMap> preds, const Mask* mask,
                      const CalibrationOptions& opts,
                      const Mask* norm_mask = nullptr);

/// Normalizes a raw prediction with the stored method and applies the fit.
DepthMap apply_model(const AlignmentModel& model, const DepthMap& raw_pred,
                     const Mask* norm_mask = nullptr);

/// Aligned depth of normalized samples under the model.
double model_depth_at(const AlignmentModel& model, const SamplePoint& p);

/// Honors SOURCE_DATE_EPOCH so repeated runs produce identical files.
std::string current_timestamp();

}  // namespace moma
