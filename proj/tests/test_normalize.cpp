// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "moma/error.hpp"
#include "moma/normalize.hpp"

using namespace moma;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected moma::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("minmax keeps the z_min offset") {
  const DepthMap pred(4, 1, {2.0, 4.0, 3.0, 6.0});
  const auto [out, stats] = normalize(pred, NormalizationMethod::kMinMax);
  CHECK(stats.z_min == 2.0);
  CHECK(stats.z_max == 6.0);
  CHECK(out.at(0, 0) == 2.0);
  CHECK(out.at(1, 0) == 2.5);
  CHECK(out.at(2, 0) == 2.25);
  CHECK(out.at(3, 0) == 3.0);
}

TEST_CASE("median/MAD uses the lower median and the mean absolute deviation") {
  const DepthMap pred(4, 1, {1.0, 2.0, 4.0, 9.0});
  const auto [out, stats] = normalize(pred, NormalizationMethod::kMedianMAD);
  CHECK(stats.median == 2.0);
  CHECK(stats.mad == doctest::Approx((1.0 + 0.0 + 2.0 + 7.0) / 4.0));
  CHECK(out.at(1, 0) == 0.0);
  CHECK(out.at(3, 0) == doctest::Approx(7.0 / 2.5));
}

TEST_CASE("none is the identity and invalid pixels stay invalid") {
  const DepthMap pred(3, 1, {0.5, NAN, 2.0});
  const auto [out, stats] = normalize(pred, NormalizationMethod::kNone);
  CHECK(out.at(0, 0) == 0.5);
  CHECK(std::isnan(out.at(1, 0)));
  const auto [mm, s2] = normalize(pred, NormalizationMethod::kMinMax);
  CHECK(std::isnan(mm.at(1, 0)));
}

TEST_CASE("statistics can be restricted to a mask") {
  const DepthMap pred(4, 1, {0.0, 1.0, 2.0, 10.0});
  const Mask mask(4, 1, {1, 1, 1, 0});
  const auto [out, stats] = normalize(pred, NormalizationMethod::kMinMax, &mask);
  CHECK(stats.z_max == 2.0);
  // Every valid pixel is mapped, masked or not.
  CHECK(out.at(3, 0) == doctest::Approx(5.0));
}

TEST_CASE("degenerate inputs") {
  const DepthMap flat(3, 1, {2.0, 2.0, 2.0});
  CHECK(code_of([&] { normalize(flat, NormalizationMethod::kMinMax); }) ==
        ErrorCode::kDegenerateRange);
  CHECK(code_of([&] { normalize(flat, NormalizationMethod::kMedianMAD); }) ==
        ErrorCode::kDegenerateMAD);
  const DepthMap empty(2, 1, {NAN, NAN});
  CHECK(code_of([&] { normalize(empty, NormalizationMethod::kMinMax); }) ==
        ErrorCode::kNoValidPixels);
  const Mask wrong = Mask::all(2, 2);
  CHECK(code_of([&] { normalize(flat, NormalizationMethod::kMinMax, &wrong); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("method names parse and print") {
  for (auto m : {NormalizationMethod::kMinMax, NormalizationMethod::kMedianMAD,
                 NormalizationMethod::kNone}) {
    CHECK(parse_normalization(to_string(m)) == m);
  }
  CHECK_FALSE(parse_normalization("zscore").has_value());
}

TEST_CASE("normalization is order preserving on random maps") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-3.0, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(64);
    for (double& z : d) z = val(rng);
    const DepthMap pred(8, 8, d);
    for (auto m : {NormalizationMethod::kMinMax, NormalizationMethod::kMedianMAD}) {
      const auto [out, stats] = normalize(pred, m);
      for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
          if (d[i] < d[j]) REQUIRE(out.data()[i] < out.data()[j]);
        }
      }
    }
  }
}
