// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "moma/depth.hpp"

namespace moma {

enum class NormalizationMethod { kMinMax, kMedianMAD, kNone };

std::string_view to_string(NormalizationMethod method) noexcept;
/// Accepts the CLI spellings: "minmax", "median", "none".
std::optional<NormalizationMethod> parse_normalization(std::string_view text);

struct NormStats {
  NormalizationMethod method = NormalizationMethod::kNone;
  // MedianMAD
  double median = 0.0;
  double mad = 0.0;  // mean absolute deviation about the median
  // MinMax
  double z_min = 0.0;
  double z_max = 0.0;
};

/// Computes the statistics over every valid pixel of `pred` (restricted to
/// `stats_mask` when given) and maps each valid pixel:
///
///   MedianMAD: (z - median) / mad, lower median for even counts.
///   MinMax:    (z - z_min) / (z_max - z_min) + z_min
///   None:      unchanged.
///
/// The MinMax output keeps the trailing "+ z_min" offset, so its valid range
/// is [z_min, z_min + 1]. Invalid pixels stay invalid.
std::pair<DepthMap, NormStats> normalize(const DepthMap& pred,
                                         NormalizationMethod method,
                                         const Mask* stats_mask = nullptr);

}  // namespace moma
