// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "moma/align_linear.hpp"
#include "moma/align_lwlr.hpp"
#include "moma/depth.hpp"
#include "moma/error.hpp"
#include "moma/parallel.hpp"

using namespace moma;

namespace {

SampleSet random_set(std::uint64_t seed, int w, int h, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<double> gt(static_cast<std::size_t>(w) * h);
  std::uniform_real_distribution<double> z(1.0, 3.0);
  for (double& x : gt) x = z(rng);
  const DepthMap gmap(w, h, gt);
  const SampleSet raw = sample_points(gmap, nullptr, n, seed);
  std::vector<double> pd(gt.size());
  std::normal_distribution<double> noise(0.0, 0.05);
  for (std::size_t i = 0; i < pd.size(); ++i) pd[i] = 0.4 * gt[i] - 0.1 + noise(rng);
  return pair_predictions(raw, DepthMap(w, h, pd));
}

// Textbook weighted regression, normal equations solved by Cramer's rule.
GlobalScaleShift naive_wls(const SampleSet& s, double b, double u, double v) {
  double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
  for (const auto& p : s.points()) {
    const double d = std::hypot(p.u - u, p.v - v);
    const double w = std::exp(-d * d / (2 * b * b)) / std::sqrt(2 * std::numbers::pi);
    sw += w;
    swx += w * p.z_p;
    swxx += w * p.z_p * p.z_p;
    swy += w * p.z_c;
    swxy += w * p.z_p * p.z_c;
  }
  const double det = swxx * sw - swx * swx;
  return {(sw * swxy - swx * swy) / det, (swxx * swy - swx * swxy) / det};
}

}  // namespace

TEST_CASE("kernel weight") {
  CHECK(lwlr_weight(0.0, 10.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)));
  CHECK(lwlr_weight(10.0, 10.0) ==
        doctest::Approx(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi)));
}

TEST_CASE("per-pixel fit agrees with a textbook weighted regression") {
  const SampleSet s = random_set(3, 40, 30, 60);
  for (double u : {0.0, 13.0, 39.0}) {
    for (double v : {0.0, 17.0, 29.0}) {
      const auto got = fit_lwlr_at(s, {8.0, 1e-6}, u, v);
      const auto ref = naive_wls(s, 8.0, u, v);
      CHECK(got.s == doctest::Approx(ref.s).epsilon(1e-10));
      CHECK(got.t == doctest::Approx(ref.t).epsilon(1e-10));
    }
  }
}

TEST_CASE("raster fit equals the per-pixel fit bit for bit at any thread count") {
  const SampleSet s = random_set(9, 48, 36, 80);
  const LwlrConfig cfg{12.0, 1e-6};
  set_thread_count(1);
  const ScaleShiftField one = fit_lwlr(s, {48, 36}, cfg);
  set_thread_count(4);
  const ScaleShiftField four = fit_lwlr(s, {48, 36}, cfg);
  set_thread_count(0);
  CHECK(one.scale == four.scale);
  CHECK(one.shift == four.shift);
  for (int v = 0; v < 36; v += 7) {
    for (int u = 0; u < 48; u += 5) {
      const auto p = fit_lwlr_at(s, cfg, u, v);
      CHECK(one.scale[static_cast<std::size_t>(v) * 48 + u] == p.s);
      CHECK(one.shift[static_cast<std::size_t>(v) * 48 + u] == p.t);
    }
  }
}

TEST_CASE("a huge bandwidth reduces to the global fit") {
  const SampleSet s = random_set(21, 64, 48, 100);
  const GlobalScaleShift g = fit_gssa(s);
  const auto p = fit_lwlr_at(s, {1e9, 1e-6}, 31.0, 7.0);
  CHECK(p.s == doctest::Approx(g.s).epsilon(1e-9));
  CHECK(p.t == doctest::Approx(g.t).epsilon(1e-9));
}

TEST_CASE("exact affine data is reproduced everywhere") {
  std::vector<SamplePoint> pts;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> zp(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double x = zp(rng);
    pts.push_back({i, (i * 7) % 20, 1.3 * x + 0.6, x});
  }
  const SampleSet s(pts);
  const auto field = fit_lwlr(s, {30, 20}, {5.0, 1e-6});
  for (std::size_t i = 0; i < field.scale.size(); ++i) {
    REQUIRE(field.scale[i] == doctest::Approx(1.3).epsilon(1e-8));
    REQUIRE(field.shift[i] == doctest::Approx(0.6).epsilon(1e-8));
  }
}

TEST_CASE("distant pixels survive kernel underflow") {
  const SampleSet s = random_set(5, 40, 30, 40);
  // Every weight underflows to zero at this distance with b = 1.
  const auto far = fit_lwlr_at(s, {1.0, 1e-6}, 5000.0, 5000.0);
  CHECK(std::isfinite(far.s));
  CHECK(std::isfinite(far.t));
}

TEST_CASE("invalid configurations and mismatched fields") {
  const SampleSet s = random_set(6, 10, 10, 20);
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  CHECK(code_of([&] { fit_lwlr_at(s, {0.0, 1e-6}, 0, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { fit_lwlr_at(s, {1.0, -1.0}, 0, 0); }) == ErrorCode::kInvalidArgument);
  const auto field = fit_lwlr(s, {10, 10}, {5.0, 1e-6});
  const DepthMap other(9, 10, std::vector<double>(90, 1.0));
  CHECK(code_of([&] { apply_lwlr(other, field); }) == ErrorCode::kDimensionMismatch);
}
