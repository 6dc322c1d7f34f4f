// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/depth.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "moma/error.hpp"
#include "rng.hpp"

namespace moma {

namespace {

void check_dims(int width, int height, std::size_t len, const char* what) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": width and height must be >= 1");
  }
  if (len != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": data length does not match width*height");
  }
}

}  // namespace

DepthMap::DepthMap(int width, int height, std::vector<double> data)
    : dims_{width, height}, data_(std::move(data)) {
  check_dims(width, height, data_.size(), "DepthMap");
  for (double& z : data_) {
    if (!is_valid(z)) z = kInvalidDepth;
  }
}

DepthMap DepthMap::from_measurements(int width, int height,
                                     std::vector<double> data) {
  for (double& z : data) {
    if (z == 0.0 || !std::isfinite(z)) z = kInvalidDepth;
  }
  return DepthMap(width, height, std::move(data));
}

DepthMap DepthMap::filled(int width, int height, double value) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "DepthMap: width and height must be >= 1");
  }
  return DepthMap(width, height,
                  std::vector<double>(static_cast<std::size_t>(width) * height,
                                      value));
}

std::size_t DepthMap::valid_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), is_valid));
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : dims_{width, height}, bits_(std::move(bits)) {
  check_dims(width, height, bits_.size(), "Mask");
}

Mask Mask::all(int width, int height) {
  return Mask(width, height,
              std::vector<std::uint8_t>(
                  static_cast<std::size_t>(width) * height, 1));
}

namespace {

void check_points(const std::vector<SamplePoint>& points,
                  const std::optional<Dims>& source) {
  if (points.empty()) {
    fail(ErrorCode::kInvalidArgument, "SampleSet: at least one point required");
  }
  for (const SamplePoint& p : points) {
    if (p.u < 0 || p.v < 0 ||
        (source && (p.u >= source->width || p.v >= source->height))) {
      fail(ErrorCode::kInvalidArgument, "SampleSet: pixel out of bounds");
    }
    if (!is_valid_measurement(p.z_c)) {
      fail(ErrorCode::kInvalidArgument,
           "SampleSet: z_c must be finite and positive");
    }
    if (std::isinf(p.z_p)) {
      fail(ErrorCode::kInvalidArgument, "SampleSet: z_p must be finite or unset");
    }
  }
}

}  // namespace

SampleSet::SampleSet(std::vector<SamplePoint> points, std::optional<Dims> source)
    : points_(std::move(points)), source_(source) {
  check_points(points_, source_);
  std::set<std::pair<int, int>> seen;
  for (const SamplePoint& p : points_) {
    if (!seen.emplace(p.u, p.v).second) {
      fail(ErrorCode::kInvalidArgument,
           "SampleSet: duplicate pixel (" + std::to_string(p.u) + ", " +
               std::to_string(p.v) + ")");
    }
  }
}

SampleSet::SampleSet(Unchecked, std::vector<SamplePoint> points,
                     std::optional<Dims> source)
    : points_(std::move(points)), source_(source) {}

SampleSet SampleSet::from_stacked(std::vector<SamplePoint> points,
                                  std::optional<Dims> source) {
  check_points(points, source);
  return SampleSet(Unchecked{}, std::move(points), source);
}

SampleSet SampleSet::stack(std::span<const SampleSet> sets) {
  if (sets.empty()) {
    fail(ErrorCode::kInvalidArgument, "stack: no sample sets given");
  }
  std::vector<SamplePoint> all;
  std::optional<Dims> source = sets.front().source();
  for (const SampleSet& s : sets) {
    all.insert(all.end(), s.points_.begin(), s.points_.end());
    if (source != s.source()) source.reset();
  }
  return SampleSet(Unchecked{}, std::move(all), source);
}

bool SampleSet::all_paired() const noexcept {
  return std::all_of(points_.begin(), points_.end(),
                     [](const SamplePoint& p) { return p.paired(); });
}

SampleSet sample_points(const DepthMap& gt, const Mask* mask, std::size_t n,
                        std::uint64_t seed) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "sample_points: n must be >= 1");
  if (mask && mask->dims() != gt.dims()) {
    fail(ErrorCode::kDimensionMismatch,
         "sample_points: mask dimensions differ from depth map");
  }

  std::vector<std::uint32_t> candidates;
  const auto data = gt.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!is_valid_measurement(data[i])) continue;
    if (mask && mask->bits()[i] == 0) continue;
    candidates.push_back(static_cast<std::uint32_t>(i));
  }
  if (candidates.empty()) {
    fail(ErrorCode::kNoValidPixels, "sample_points: no valid masked pixels");
  }

  // Partial Fisher-Yates: the first `take` slots end up a uniform draw.
  const std::size_t take = std::min(n, candidates.size());
  std::mt19937_64 gen(seed);
  std::vector<SamplePoint> points;
  points.reserve(take);
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t j =
        k + detail::uniform_below(gen, candidates.size() - k);
    std::swap(candidates[k], candidates[j]);
    const std::uint32_t idx = candidates[k];
    SamplePoint p;
    p.u = static_cast<int>(idx % gt.width());
    p.v = static_cast<int>(idx / gt.width());
    p.z_c = data[idx];
    points.push_back(p);
  }
  return SampleSet(std::move(points), gt.dims());
}

SampleSet pair_predictions(const SampleSet& samples, const DepthMap& pred) {
  if (samples.source() && *samples.source() != pred.dims()) {
    fail(ErrorCode::kDimensionMismatch,
         "pair_predictions: prediction dimensions differ from sample source");
  }
  std::vector<SamplePoint> kept;
  kept.reserve(samples.size());
  for (const SamplePoint& p : samples.points()) {
    if (p.u >= pred.width() || p.v >= pred.height()) {
      fail(ErrorCode::kDimensionMismatch,
           "pair_predictions: sample lies outside the prediction");
    }
    const double z = pred.at(p.u, p.v);
    if (!is_valid(z)) continue;
    SamplePoint q = p;
    q.z_p = z;
    kept.push_back(q);
  }
  if (kept.empty()) {
    fail(ErrorCode::kEmptyAfterPairing,
         "pair_predictions: every sampled pixel is invalid in the prediction");
  }
  return SampleSet(SampleSet::Unchecked{}, std::move(kept), pred.dims());
}

}  // namespace moma
