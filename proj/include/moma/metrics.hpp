// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "moma/depth.hpp"

namespace moma {

struct MetricsReport {
  double rmse = 0.0;  // m
  double rel = 0.0;
  double mae = 0.0;   // m
  double delta_105 = 0.0;
  double delta_110 = 0.0;
  double delta_125 = 0.0;
  std::size_t pixel_count = 0;
};

/// Fraction-of-pixels accuracy: max(d / d_p, d_p / d) < threshold, strict.
/// A nonpositive d_p always fails.
bool within_delta(double gt, double pred, double threshold) noexcept;

/// Metrics over pixels where gt is a valid measurement, pred is valid, and
/// the mask (if any) is set. Aligned depths that are zero or negative stay in
/// the set: they fail every delta threshold and still count toward MAE, RMSE
/// and REL.
MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt,
                       const Mask* mask = nullptr);

/// One `name=value` per line, ordered delta_105, delta_110, delta_125, rel,
/// rmse, mae, pixel_count.
std::string to_key_value(const MetricsReport& report);
std::string to_json(const MetricsReport& report);
/// Header row plus value row in the same column order.
std::string to_table(const MetricsReport& report);

}  // namespace moma
