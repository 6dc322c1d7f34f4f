// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "moma/error.hpp"
#include "moma/metrics.hpp"

using namespace moma;

TEST_CASE("two-pixel worked example") {
  const DepthMap gt(2, 1, {1.0, 2.0});
  const DepthMap pred(2, 1, {1.0, 2.3});
  const MetricsReport m = evaluate(pred, gt);
  CHECK(m.pixel_count == 2);
  CHECK(m.mae == doctest::Approx(0.15));
  CHECK(m.rel == doctest::Approx(0.075));
  CHECK(m.rmse == doctest::Approx(std::sqrt(0.045)));
  CHECK(m.delta_105 == 0.5);
  CHECK(m.delta_110 == 0.5);
  CHECK(m.delta_125 == 1.0);
}

TEST_CASE("identical maps are perfect") {
  const DepthMap gt(3, 1, {1.0, 1.5, 2.0});
  const MetricsReport m = evaluate(gt, gt);
  CHECK(m.mae == 0.0);
  CHECK(m.rmse == 0.0);
  CHECK(m.rel == 0.0);
  CHECK(m.delta_105 == 1.0);
}

TEST_CASE("delta threshold is strict and nonpositive predictions fail") {
  CHECK_FALSE(within_delta(1.0, 1.25, 1.25));
  CHECK(within_delta(1.0, 1.2, 1.25));
  CHECK_FALSE(within_delta(1.0, 0.0, 1.25));
  CHECK_FALSE(within_delta(1.0, -1.0, 1.25));
  const DepthMap gt(2, 1, {1.0, 1.0});
  const DepthMap pred(2, 1, {1.0, -1.0});
  const MetricsReport m = evaluate(pred, gt);
  CHECK(m.pixel_count == 2);
  CHECK(m.delta_125 == 0.5);
  CHECK(m.mae == doctest::Approx(1.0));
}

TEST_CASE("masks and missing pixels restrict the evaluation set") {
  const auto gt = DepthMap::from_measurements(4, 1, {1.0, 0.0, 2.0, 3.0});
  const DepthMap pred(4, 1, {1.5, 1.0, NAN, 3.0});
  const MetricsReport all = evaluate(pred, gt);
  CHECK(all.pixel_count == 2);
  const Mask mask(4, 1, {0, 1, 1, 1});
  const MetricsReport masked = evaluate(pred, gt, &mask);
  CHECK(masked.pixel_count == 1);
  CHECK(masked.mae == 0.0);
  const Mask none(4, 1, {0, 0, 0, 0});
  CHECK_THROWS_AS(evaluate(pred, gt, &none), Error);
  CHECK_THROWS_AS(evaluate(DepthMap(3, 1, {1, 1, 1}), gt), Error);
}

TEST_CASE("report formats keep the table column order") {
  MetricsReport m;
  m.delta_105 = 0.5;
  m.rmse = 0.25;
  m.pixel_count = 3;
  const std::string kv = to_key_value(m);
  CHECK(kv.find("delta_105=") < kv.find("delta_110="));
  CHECK(kv.find("delta_125=") < kv.find("rel="));
  CHECK(kv.find("rel=") < kv.find("rmse="));
  CHECK(kv.find("rmse=") < kv.find("mae="));
  const std::string js = to_json(m);
  CHECK(js.find("\"delta_105\"") < js.find("\"mae\""));
  const std::string table = to_table(m);
  CHECK(table.find("REL") < table.find("RMSE"));
}

TEST_CASE("delta fractions are monotone in the threshold") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> z(0.5, 3.0), f(0.6, 1.6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> g(50), p(50);
    for (int i = 0; i < 50; ++i) {
      g[i] = z(rng);
      p[i] = g[i] * f(rng);
    }
    const MetricsReport m = evaluate(DepthMap(10, 5, p), DepthMap(10, 5, g));
    CHECK(m.delta_105 <= m.delta_110);
    CHECK(m.delta_110 <= m.delta_125);
  }
}
