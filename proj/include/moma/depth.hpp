// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace moma {

inline constexpr double kInvalidDepth = std::numeric_limits<double>::quiet_NaN();

/// Stored values are valid iff finite. Loaders and from_measurements()
/// canonicalize the sensor encodings (0.0, NaN, +-inf) to NaN, so after
/// construction a single predicate applies everywhere. Normalized and
/// aligned maps may legitimately hold zero or negative values.
inline bool is_valid(double z) noexcept { return std::isfinite(z); }

/// A measured depth is usable as ground truth only if strictly positive.
inline bool is_valid_measurement(double z) noexcept {
  return std::isfinite(z) && z > 0.0;
}

struct Dims {
  int width = 0;
  int height = 0;

  std::size_t pixels() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense row-major depth raster in meters (or normalized units).
class DepthMap {
 public:
  DepthMap(int width, int height, std::vector<double> data);

  /// Treats 0.0 and non-finite entries as missing.
  static DepthMap from_measurements(int width, int height,
                                    std::vector<double> data);
  static DepthMap filled(int width, int height, double value);

  int width() const noexcept { return dims_.width; }
  int height() const noexcept { return dims_.height; }
  Dims dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  double at(int u, int v) const noexcept {
    return data_[static_cast<std::size_t>(v) * dims_.width + u];
  }
  std::span<const double> data() const noexcept { return data_; }
  std::size_t valid_count() const noexcept;

 private:
  Dims dims_;
  std::vector<double> data_;
};

class Mask {
 public:
  Mask(int width, int height, std::vector<std::uint8_t> bits);
  static Mask all(int width, int height);

  int width() const noexcept { return dims_.width; }
  int height() const noexcept { return dims_.height; }
  Dims dims() const noexcept { return dims_; }
  bool at(int u, int v) const noexcept {
    return bits_[static_cast<std::size_t>(v) * dims_.width + u] != 0;
  }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

 private:
  Dims dims_;
  std::vector<std::uint8_t> bits_;
};

struct SamplePoint {
  int u = 0;
  int v = 0;
  double z_c = 0.0;
  double z_p = kInvalidDepth;  // NaN until paired with a prediction

  bool paired() const noexcept { return is_valid(z_p); }
  friend bool operator==(const SamplePoint&, const SamplePoint&) = default;
};

/// Sparse calibration points drawn from one image. `source` records the raster
/// dimensions the points were drawn from when known (CSV input has none).
///
/// A single-scene set never repeats a pixel. stack() concatenates sets from
/// several scenes taken at the same pose, where repeated pixels are expected.
class SampleSet {
 public:
  explicit SampleSet(std::vector<SamplePoint> points,
                     std::optional<Dims> source = std::nullopt);

  static SampleSet stack(std::span<const SampleSet> sets);
  /// Points of an already stacked set; repeated pixels are accepted.
  static SampleSet from_stacked(std::vector<SamplePoint> points,
                                std::optional<Dims> source = std::nullopt);

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const SamplePoint> points() const noexcept { return points_; }
  const SamplePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::optional<Dims>& source() const noexcept { return source_; }
  bool all_paired() const noexcept;

 private:
  friend SampleSet pair_predictions(const SampleSet&, const DepthMap&);
  struct Unchecked {};
  SampleSet(Unchecked, std::vector<SamplePoint> points,
            std::optional<Dims> source);

  std::vector<SamplePoint> points_;
  std::optional<Dims> source_;
};

/// Draws min(n, #valid) distinct pixels uniformly without replacement from
/// pixels that are valid measurements in `gt` and set in `mask`. The draw is
/// a pure function of its arguments.
SampleSet sample_points(const DepthMap& gt, const Mask* mask, std::size_t n,
                        std::uint64_t seed);

/// Fills z_p from `pred`; points whose predicted pixel is invalid are dropped.
SampleSet pair_predictions(const SampleSet& samples, const DepthMap& pred);

}  // namespace moma
