// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/metrics.hpp"

#include <cmath>
#include <cstdio>
#include "json.hpp"

#include "moma/error.hpp"

namespace moma {

bool within_delta(double gt, double pred, double threshold) noexcept {
  if (!(pred > 0.0) || !(gt > 0.0)) return false;
  return std::max(gt / pred, pred / gt) < threshold;
}

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt,
                       const Mask* mask) {
  if (pred.dims() != gt.dims() || (mask && mask->dims() != gt.dims())) {
    fail(ErrorCode::kDimensionMismatch, "evaluate: map dimensions differ");
  }
  const auto p = pred.data();
  const auto g = gt.data();
  double sum_abs = 0.0, sum_sq = 0.0, sum_rel = 0.0;
  std::size_t n = 0, hit_105 = 0, hit_110 = 0, hit_125 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!is_valid_measurement(g[i]) || !is_valid(p[i])) continue;
    if (mask && mask->bits()[i] == 0) continue;
    const double err = std::abs(g[i] - p[i]);
    sum_abs += err;
    sum_sq += err * err;
    sum_rel += err / g[i];
    hit_105 += within_delta(g[i], p[i], 1.05);
    hit_110 += within_delta(g[i], p[i], 1.10);
    hit_125 += within_delta(g[i], p[i], 1.25);
    ++n;
  }
  if (n == 0) {
    fail(ErrorCode::kNoValidPixels, "evaluate: no pixel is valid in both maps");
  }
  const double count = static_cast<double>(n);
  MetricsReport r;
  r.pixel_count = n;
  r.mae = sum_abs / count;
  r.rmse = std::sqrt(sum_sq / count);
  r.rel = sum_rel / count;
  r.delta_105 = static_cast<double>(hit_105) / count;
  r.delta_110 = static_cast<double>(hit_110) / count;
  r.delta_125 = static_cast<double>(hit_125) / count;
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string to_key_value(const MetricsReport& r) {
  std::string out;
  out += "delta_105=" + fmt(r.delta_105) + "\n";
  out += "delta_110=" + fmt(r.delta_110) + "\n";
  out += "delta_125=" + fmt(r.delta_125) + "\n";
  out += "rel=" + fmt(r.rel) + "\n";
  out += "rmse=" + fmt(r.rmse) + "\n";
  out += "mae=" + fmt(r.mae) + "\n";
  out += "pixel_count=" + std::to_string(r.pixel_count) + "\n";
  return out;
}

std::string to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["delta_105"] = r.delta_105;
  j["delta_110"] = r.delta_110;
  j["delta_125"] = r.delta_125;
  j["rel"] = r.rel;
  j["rmse"] = r.rmse;
  j["mae"] = r.mae;
  j["pixel_count"] = r.pixel_count;
  return j.dump() + "\n";
}

std::string to_table(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-9s %-9s %-9s %-9s %-9s %-9s\n"
                "%-9.4f %-9.4f %-9.4f %-9.4f %-9.4f %-9.4f\n",
                "d1.05", "d1.10", "d1.25", "REL", "RMSE", "MAE", r.delta_105,
                r.delta_110, r.delta_125, r.rel, r.rmse, r.mae);
  return buf;
}

}  // namespace moma
