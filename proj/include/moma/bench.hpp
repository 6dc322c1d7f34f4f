// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moma/metrics.hpp"
#include "moma/model.hpp"
#include "moma/synth.hpp"

namespace moma {

struct BenchOptions {
  std::vector<AlignMethod> methods{AlignMethod::kGssa, AlignMethod::kLwlr,
                                   AlignMethod::kSsra};
  std::vector<std::size_t> n_sweep{20, 50, 100, 400, 1000};
  int seeds = 5;
  std::uint64_t first_seed = 0;
  NormalizationMethod norm = NormalizationMethod::kNone;
  LwlrConfig lwlr;
  SolverConfig solver;
};

struct BenchRow {
  AlignMethod method = AlignMethod::kSsra;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // set when !ok
  MetricsReport metrics;
  double calib_ms = 0.0;
};

/// For every seed the scene is rendered and perturbed once; then every
/// (method, n) pair is calibrated on the paired ground truth, applied to the
/// same prediction, and scored against the noise-free render. A failing run
/// becomes a row with ok == false; the sweep continues.
std::vector<BenchRow> run_bench(const SynthConfig& config, const BenchOptions& opts);

/// Header: method,n,seed,status,delta_105,delta_110,delta_125,rel,rmse,mae,
/// pixel_count,calib_ms,error
std::string bench_to_csv(const std::vector<BenchRow>& rows);

}  // namespace moma
