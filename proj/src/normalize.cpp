// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "moma/error.hpp"

namespace moma {

std::string_view to_string(NormalizationMethod method) noexcept {
  switch (method) {
    case NormalizationMethod::kMinMax: return "minmax";
    case NormalizationMethod::kMedianMAD: return "median";
    case NormalizationMethod::kNone: return "none";
  }
  return "none";
}

std::optional<NormalizationMethod> parse_normalization(std::string_view text) {
  if (text == "minmax") return NormalizationMethod::kMinMax;
  if (text == "median") return NormalizationMethod::kMedianMAD;
  if (text == "none") return NormalizationMethod::kNone;
  return std::nullopt;
}

namespace {

std::vector<double> collect_valid(const DepthMap& pred, const Mask* mask) {
  std::vector<double> values;
  values.reserve(pred.size());
  const auto data = pred.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!is_valid(data[i])) continue;
    if (mask && mask->bits()[i] == 0) continue;
    values.push_back(data[i]);
  }
  return values;
}

template <typename Fn>
DepthMap map_valid(const DepthMap& pred, Fn fn) {
  std::vector<double> out(pred.data().begin(), pred.data().end());
  for (double& z : out) {
    if (is_valid(z)) z = fn(z);
  }
  return DepthMap(pred.width(), pred.height(), std::move(out));
}

}  // namespace

std::pair<DepthMap, NormStats> normalize(const DepthMap& pred,
                                         NormalizationMethod method,
                                         const Mask* stats_mask) {
  NormStats stats;
  stats.method = method;
  if (method == NormalizationMethod::kNone) return {pred, stats};

  if (stats_mask && stats_mask->dims() != pred.dims()) {
    fail(ErrorCode::kDimensionMismatch,
         "normalize: mask dimensions differ from prediction");
  }
  std::vector<double> values = collect_valid(pred, stats_mask);
  if (values.empty()) {
    fail(ErrorCode::kNoValidPixels, "normalize: prediction has no valid pixels");
  }

  if (method == NormalizationMethod::kMinMax) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    stats.z_min = *lo;
    stats.z_max = *hi;
    const double range = stats.z_max - stats.z_min;
    if (!(range > 0.0)) {
      fail(ErrorCode::kDegenerateRange, "normalize: z_max == z_min");
    }
    const double z_min = stats.z_min;
    return {map_valid(pred, [=](double z) { return (z - z_min) / range + z_min; }),
            stats};
  }

  const std::size_t mid = (values.size() - 1) / 2;  // lower median
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  stats.median = values[mid];
  double sum = 0.0;
  for (double z : values) sum += std::abs(z - stats.median);
  stats.mad = sum / static_cast<double>(values.size());
  if (!(stats.mad > 0.0)) {
    fail(ErrorCode::kDegenerateMAD, "normalize: mean absolute deviation is zero");
  }
  const double m = stats.median;
  const double mu = stats.mad;
  return {map_valid(pred, [=](double z) { return (z - m) / mu; }), stats};
}

}  // namespace moma
