// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/bench.hpp"

#include <chrono>
#include <cstdio>

#include "moma/error.hpp"

namespace moma {

std::vector<BenchRow> run_bench(const SynthConfig& config, const BenchOptions& opts) {
  if (opts.seeds < 1 || opts.methods.empty() || opts.n_sweep.empty()) {
    fail(ErrorCode::kInvalidArgument, "bench: empty sweep");
  }
  const DepthMap clean = render_scene(config.scene);
  std::vector<BenchRow> rows;
  for (int k = 0; k < opts.seeds; ++k) {
    const std::uint64_t seed = opts.first_seed + static_cast<std::uint64_t>(k);
    std::optional<Perturbed> data;
    std::string scene_error;
    try {
      data = perturb(clean, config.perturbation, seed);
    } catch (const Error& e) {
      scene_error = e.what();
    }
    for (AlignMethod method : opts.methods) {
      for (std::size_t n : opts.n_sweep) {
        BenchRow row;
        row.method = method;
        row.n = n;
        row.seed = seed;
        if (!data) {
          row.error = scene_error;
          rows.push_back(row);
          continue;
        }
        try {
          CalibrationOptions co;
          co.method = method;
          co.norm = opts.norm;
          co.n = n;
          co.seed = seed;
          co.lwlr = opts.lwlr;
          co.solver = opts.solver;
          const auto t0 = std::chrono::steady_clock::now();
          const Calibration cal = calibrate(std::span(&data->gt_paired, 1),
                                            std::span(&data->pred, 1), nullptr, co);
          const auto t1 = std::chrono::steady_clock::now();
          row.calib_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          row.metrics = evaluate(apply_model(cal.model, data->pred), clean);
          row.ok = true;
        } catch (const Error& e) {
          row.error = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "method,n,seed,status,delta_105,delta_110,delta_125,rel,rmse,mae,"
      "pixel_count,calib_ms,error\n";
  char buf[512];
  for (const BenchRow& r : rows) {
    std::string err = r.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    if (r.ok) {
      std::snprintf(buf, sizeof(buf),
                    "%s,%zu,%llu,ok,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%zu,%.3f,\n",
                    std::string(to_string(r.method)).c_str(), r.n,
                    static_cast<unsigned long long>(r.seed), r.metrics.delta_105,
                    r.metrics.delta_110, r.metrics.delta_125, r.metrics.rel,
                    r.metrics.rmse, r.metrics.mae, r.metrics.pixel_count, r.calib_ms);
      out += buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%zu,%llu,failed,,,,,,,,,",
                    std::string(to_string(r.method)).c_str(), r.n,
                    static_cast<unsigned long long>(r.seed));
      out += buf + err + "\n";
    }
  }
  return out;
}

}  // namespace moma
