// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Every tolerance, seed and sweep below is fixed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "moma/align_linear.hpp"
#include "moma/align_lwlr.hpp"
#include "moma/align_ssra.hpp"
#include "moma/bench.hpp"
#include "moma/error.hpp"
#include "moma/metrics.hpp"
#include "moma/model.hpp"
#include "moma/normalize.hpp"
#include "moma/synth.hpp"

using namespace moma;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs_error(const DepthMap& a, const DepthMap& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    if (std::isnan(x) || std::isnan(y)) {
      if (std::isnan(x) != std::isnan(y)) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(x - y));
  }
  return worst;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ThetaParams default_intrinsics(ThetaParams th, int w = 320, int h = 240) {
  th.cxp = w / 2.0;
  th.cyp = h / 2.0;
  th.fp = std::max(w, h);
  return th;
}

// Θ* drawn from |θ|, |φ| ≤ 0.3 rad, s ∈ [0.3, 3], T3 ∈ [-1, 1].
ThetaParams draw_theta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-0.3, 0.3), s(0.3, 3.0), t(-1.0, 1.0);
  ThetaParams th;
  th.s = s(rng);
  th.theta = ang(rng);
  th.phi = ang(rng);
  th.t3 = t(rng);
  return default_intrinsics(th);
}

Calibration calibrate_one(const DepthMap& gt, const DepthMap& pred, AlignMethod method,
                          NormalizationMethod norm, std::size_t n, std::uint64_t seed) {
  CalibrationOptions opts;
  opts.method = method;
  opts.norm = norm;
  opts.n = n;
  opts.seed = seed;
  return calibrate(std::span(&gt, 1), std::span(&pred, 1), nullptr, opts);
}

const DepthMap& tabletop() {
  static const DepthMap gt = render_scene(tabletop_scene(320, 240));
  return gt;
}

// 1 -------------------------------------------------------------------------
Outcome oracle_round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    PerturbationSpec ps;
    ps.theta_star = draw_theta(rng);
    const Perturbed p = perturb(tabletop(), ps, trial);
    const Calibration c =
        calibrate_one(tabletop(), p.pred, AlignMethod::kSsra, NormalizationMethod::kNone, 100,
                      static_cast<std::uint64_t>(trial));
    worst = std::max(worst, max_abs_error(apply_model(c.model, p.pred), tabletop()));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 60.0,
          fmt("max abs error %.3g m over 50 draws (< 1e-6), %.2f s (< 60 s)", worst, secs)};
}

// 2 -------------------------------------------------------------------------
Outcome noisy_recovery() {
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  int ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    PerturbationSpec ps;
    ps.theta_star = draw_theta(rng);
    ps.gt_noise_sigma = 0.005;
    const Perturbed p = perturb(tabletop(), ps, 100 + seed);
    const Calibration c = calibrate_one(p.gt_paired, p.pred, AlignMethod::kSsra,
                                        NormalizationMethod::kNone, 100, seed);
    const double mae = evaluate(apply_model(c.model, p.pred), tabletop()).mae;
    worst = std::max(worst, mae);
    ok += mae < 0.01;
  }
  return {ok == 20, fmt("%d/20 seeds with MAE < 0.01 m, worst %.4g m", ok, worst)};
}

// 3 -------------------------------------------------------------------------
Outcome method_ordering() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> big(0.15, 0.3), any(-0.3, 0.3), s(0.5, 2.0),
      t(-0.5, 0.5);
  std::bernoulli_distribution coin(0.5);
  int wins = 0;
  std::vector<double> mae_ssra, mae_gssa, mae_lwlr;
  for (int seed = 0; seed < 20; ++seed) {
    ThetaParams th;
    th.s = s(rng);
    th.t3 = t(rng);
    // At least one angle of magnitude ≥ 0.15 rad.
    const double strong = coin(rng) ? big(rng) : -big(rng);
    if (coin(rng)) {
      th.theta = strong;
      th.phi = any(rng);
    } else {
      th.phi = strong;
      th.theta = any(rng);
    }
    PerturbationSpec ps;
    ps.theta_star = default_intrinsics(th);
    ps.gt_noise_sigma = 0.005;
    const Perturbed p = perturb(tabletop(), ps, 300 + seed);
    double mae[3];
    const AlignMethod methods[3] = {AlignMethod::kSsra, AlignMethod::kGssa, AlignMethod::kLwlr};
    for (int k = 0; k < 3; ++k) {
      const Calibration c =
          calibrate_one(p.gt_paired, p.pred, methods[k], NormalizationMethod::kNone, 100, seed);
      mae[k] = evaluate(apply_model(c.model, p.pred), tabletop()).mae;
    }
    mae_ssra.push_back(mae[0]);
    mae_gssa.push_back(mae[1]);
    mae_lwlr.push_back(mae[2]);
    wins += mae[0] < mae[1] && mae[0] < mae[2];
  }
  return {wins >= 18,
          fmt("ssra best on %d/20 seeds (>= 18); median MAE ssra %.4g, gssa %.4g, lwlr %.4g m",
              wins, median(mae_ssra), median(mae_gssa), median(mae_lwlr))};
}

SampleSet random_sample_set(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> u(0, 319), v(0, 239);
  std::uniform_real_distribution<double> zp(0.0, 1.5), zc(0.5, 3.0);
  std::vector<SamplePoint> pts;
  std::vector<bool> used(320 * 240, false);
  while (static_cast<int>(pts.size()) < n) {
    const int pu = u(rng), pv = v(rng);
    if (used[pv * 320 + pu]) continue;
    used[pv * 320 + pu] = true;
    pts.push_back({pu, pv, zc(rng), zp(rng)});
  }
  return SampleSet(pts, Dims{320, 240});
}

// 4 -------------------------------------------------------------------------
Outcome frozen_angles() {
  std::mt19937_64 rng(4004);
  double worst = 0.0;
  SolverConfig cfg;
  cfg.frozen[kTheta] = cfg.frozen[kPhi] = true;
  for (int i = 0; i < 100; ++i) {
    const SampleSet s = random_sample_set(rng, 100);
    const SsraFit fit = fit_ssra(s, cfg, {320, 240});
    const double gssa = gssa_cost(s, fit_gssa(s)) / static_cast<double>(s.size());
    worst = std::max(worst, std::abs(ssra_cost(s, fit.theta) - gssa));
  }
  return {worst < 1e-12, fmt("max |cost_ssra - cost_gssa| = %.3g (< 1e-12) over 100 sets", worst)};
}

// 5 -------------------------------------------------------------------------
Outcome gssa_optimality() {
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> zp(0.0, 1.0), s(-2.0, 2.0), t(-1.0, 1.0),
      noise(-0.2, 0.2);
  int beaten = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const double s0 = s(rng), t0 = t(rng);
    std::vector<SamplePoint> pts;
    for (int k = 0; k < 5; ++k) {
      const double x = zp(rng);
      pts.push_back({k, 0, std::max(0.01, s0 * x + t0 + 2.5 + noise(rng)), x});
    }
    const SampleSet set(pts);
    const double closed = gssa_cost(set, fit_gssa(set));
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 400; ++i) {
      for (int j = 0; j < 400; ++j) {
        const GlobalScaleShift g{-4.0 + 8.0 * i / 399.0, -1.0 + 8.0 * j / 399.0};
        grid_best = std::min(grid_best, gssa_cost(set, g));
      }
    }
    beaten += !(closed <= grid_best);
  }
  return {beaten == 0, fmt("closed form <= 400x400 grid optimum on %d/100 instances", 100 - beaten)};
}

// 6 -------------------------------------------------------------------------
Outcome lwlr_limit() {
  std::mt19937_64 rng(6006);
  const SampleSet s = random_sample_set(rng, 200);
  const GlobalScaleShift g = fit_gssa(s);
  const LwlrConfig cfg{1e9, 1e-6};
  std::uniform_real_distribution<double> u(0, 319), v(0, 239);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GlobalScaleShift p = fit_lwlr_at(s, cfg, std::round(u(rng)), std::round(v(rng)));
    worst = std::max({worst, std::abs(p.s - g.s), std::abs(p.t - g.t)});
  }
  return {worst < 1e-6, fmt("max |(s,t) - gssa| = %.3g (< 1e-6) at 1000 pixels", worst)};
}

// 7 -------------------------------------------------------------------------
Outcome jacobian_check() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> u(0, 640), v(0, 480), z(0.2, 4.0), c(-30, 30),
      f(300, 900);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ThetaParams th = draw_theta(rng);
    th.cxp = 320 + c(rng);
    th.cyp = 240 + c(rng);
    th.fp = f(rng);
    const double pu = u(rng), pv = v(rng), pz = z(rng);
    const auto jac = forward_jacobian(pu, pv, pz, th);
    const auto base = th.to_array();
    for (std::size_t k = 0; k < ThetaParams::kCount; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(base[k]));
      auto hi = base, lo = base;
      hi[k] += h;
      lo[k] -= h;
      const double fd = (forward_model(pu, pv, pz, ThetaParams::from_array(hi)) -
                         forward_model(pu, pv, pz, ThetaParams::from_array(lo))) /
                        (2.0 * h);
      // Relative to the gradient magnitude at this point, so entries that are
      // zero by symmetry do not divide by zero.
      double norm = 0.0;
      for (double d : jac) norm = std::max(norm, std::abs(d));
      worst = std::max(worst, std::abs(jac[k] - fd) / std::max(std::abs(fd), 1e-3 * norm));
    }
  }
  return {worst < 1e-5, fmt("max relative error %.3g (< 1e-5) at 100 points", worst)};
}

// 8 -------------------------------------------------------------------------
Outcome normalization_invariants() {
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<double> scale(0.01, 100.0), off(-50.0, 50.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> side(2, 24);
  double worst_median = 0.0, worst_mad = 0.0, worst_width = 0.0, worst_min = 0.0;
  bool ordered = true;
  for (int m = 0; m < 1000; ++m) {
    const int w = side(rng), h = side(rng);
    const double a = scale(rng), b = off(rng);
    std::vector<double> d(static_cast<std::size_t>(w) * h);
    for (double& z : d) z = a * unit(rng) + b;
    if (m % 3 == 0) d[d.size() / 2] = kInvalidDepth;
    const DepthMap pred(w, h, d);

    const auto [mm, mm_stats] = normalize(pred, NormalizationMethod::kMinMax);
    const auto [md, md_stats] = normalize(pred, NormalizationMethod::kMedianMAD);
    std::vector<double> out_mm, out_md, in;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (std::isnan(d[i])) continue;
      in.push_back(d[i]);
      out_mm.push_back(mm.data()[i]);
      out_md.push_back(md.data()[i]);
    }
    const auto [lo, hi] = std::minmax_element(out_mm.begin(), out_mm.end());
    worst_width = std::max(worst_width, std::abs((*hi - *lo) - 1.0));
    worst_min = std::max(worst_min, std::abs(*lo - mm_stats.z_min));

    std::vector<double> sorted = out_md;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[(sorted.size() - 1) / 2];
    double mad = 0.0;
    for (double z : out_md) mad += std::abs(z - med);
    mad /= static_cast<double>(out_md.size());
    worst_median = std::max(worst_median, std::abs(med));
    worst_mad = std::max(worst_mad, std::abs(mad - 1.0));

    std::vector<std::size_t> idx(in.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return in[x] < in[y]; });
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (in[idx[k - 1]] < in[idx[k]]) {
        ordered = ordered && out_mm[idx[k - 1]] < out_mm[idx[k]] &&
                  out_md[idx[k - 1]] < out_md[idx[k]];
      }
    }
  }
  // Range width and offset carry the rounding of one subtraction at |z_min|
  // up to 50, hence the 1e-12 tolerance.
  const bool pass = worst_median == 0.0 && worst_mad < 1e-12 && worst_width < 1e-12 &&
                    worst_min < 1e-12 && ordered;
  return {pass, fmt("median %.2g, |MAD-1| %.2g, |width-1| %.2g, |min-z_min| %.2g, "
                    "order preserved: %s (1000 maps)",
                    worst_median, worst_mad, worst_width, worst_min, ordered ? "yes" : "no")};
}

// 9 -------------------------------------------------------------------------
double jitter_spread(NormalizationMethod norm, int scenes, int copies, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ja(0.5, 1.5), jb(-0.3, 0.3);
  double worst = 0.0;
  for (int sc = 0; sc < scenes; ++sc) {
    PerturbationSpec ps;
    ps.theta_star = draw_theta(rng);
    const Perturbed base = perturb(tabletop(), ps, sc);
    const Calibration c = calibrate_one(tabletop(), base.pred, AlignMethod::kSsra, norm, 100, sc);
    const DepthMap reference = apply_model(c.model, base.pred);
    for (int k = 0; k < copies; ++k) {
      ps.jitter_a = ja(rng);
      ps.jitter_b = jb(rng);
      const Perturbed jit = perturb(tabletop(), ps, sc);
      worst = std::max(worst, max_abs_error(apply_model(c.model, jit.pred), reference));
    }
  }
  return worst;
}

Outcome fluctuation_immunity() {
  const double spread = jitter_spread(NormalizationMethod::kMinMax, 5, 8, 9009);
  return {spread < 1e-6,
          fmt("max spread across jittered copies %.3g m (< 1e-6), minmax, 5 scenes x 8 copies",
              spread)};
}

// 10 ------------------------------------------------------------------------
Outcome runtime_budget() {
  const DepthMap gt = render_scene(tabletop_scene(640, 480));
  PerturbationSpec ps;
  ps.theta_star = default_intrinsics({1.2, 0.2, -0.15, 0.1, 0, 0, 1}, 640, 480);
  const Perturbed p = perturb(gt, ps, 0);

  std::vector<double> calib_s;
  Calibration c = calibrate_one(gt, p.pred, AlignMethod::kSsra, NormalizationMethod::kMinMax,
                                100, 0);
  for (int r = 0; r < 10; ++r) {
    const auto t0 = Clock::now();
    c = calibrate_one(gt, p.pred, AlignMethod::kSsra, NormalizationMethod::kMinMax, 100, r);
    calib_s.push_back(seconds_since(t0));
  }
  std::vector<double> apply_ms;
  for (int r = 0; r < 100; ++r) {
    const auto t0 = Clock::now();
    const DepthMap out = apply_model(c.model, p.pred);
    apply_ms.push_back(1e3 * seconds_since(t0));
    if (out.size() != p.pred.size()) return {false, "apply returned the wrong size"};
  }
  const double apply_med = median(apply_ms);
  const double calib_max = *std::max_element(calib_s.begin(), calib_s.end());
  return {apply_med < 10.0 && calib_max < 1.0,
          fmt("apply 640x480 median %.3f ms (< 10 ms, 100 runs); ssra calibration n=100 "
              "max %.3f s (< 1 s, 10 runs)",
              apply_med, calib_max)};
}

// 11 ------------------------------------------------------------------------
Outcome sample_plateau() {
  SynthConfig cfg;
  cfg.scene = tabletop_scene(320, 240);
  cfg.perturbation.theta_star = default_intrinsics({1.4, 0.2, -0.2, 0.15, 0, 0, 1});
  cfg.perturbation.gt_noise_sigma = 0.005;
  cfg.perturbation.pred_noise_sigma = 0.005;
  BenchOptions opts;
  opts.methods = {AlignMethod::kSsra};
  opts.n_sweep = {20, 50, 100, 400, 1000, 3000};
  opts.seeds = 10;
  opts.first_seed = 11000;
  opts.norm = NormalizationMethod::kNone;
  const auto rows = run_bench(cfg, opts);
  std::string curve;
  double at400 = 0.0, at3000 = 0.0;
  for (std::size_t n : opts.n_sweep) {
    std::vector<double> maes;
    for (const BenchRow& r : rows) {
      if (r.n != n) continue;
      if (!r.ok) return {false, "bench run failed: " + r.error};
      maes.push_back(r.metrics.mae);
    }
    const double med = median(maes);
    curve += fmt("%s%zu:%.4g", curve.empty() ? "" : " ", n, med);
    if (n == 400) at400 = med;
    if (n == 3000) at3000 = med;
  }
  const double rel = std::abs(at400 - at3000) / at3000;
  return {rel < 0.10, fmt("median MAE n=400 vs n=3000 differ by %.1f%% (< 10%%); curve %s",
                          100.0 * rel, curve.c_str())};
}

// 12 ------------------------------------------------------------------------
Outcome metrics_arithmetic() {
  const DepthMap gt(2, 1, {1.0, 2.0});
  const DepthMap pred(2, 1, {1.0, 2.3});
  const MetricsReport m = evaluate(pred, gt);

  // Brute force straight from the definitions.
  double ae = 0, se = 0, re = 0;
  int d105 = 0, d110 = 0, d125 = 0;
  const double g[2] = {1.0, 2.0}, p[2] = {1.0, 2.3};
  for (int i = 0; i < 2; ++i) {
    ae += std::abs(g[i] - p[i]);
    se += (g[i] - p[i]) * (g[i] - p[i]);
    re += std::abs(g[i] - p[i]) / g[i];
    const double ratio = std::max(g[i] / p[i], p[i] / g[i]);
    d105 += ratio < 1.05;
    d110 += ratio < 1.10;
    d125 += ratio < 1.25;
  }
  auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  bool ok = close(m.mae, ae / 2) && close(m.rmse, std::sqrt(se / 2)) && close(m.rel, re / 2) &&
            m.delta_105 == d105 / 2.0 && m.delta_110 == d110 / 2.0 &&
            m.delta_125 == d125 / 2.0;
  ok = ok && close(m.mae, 0.15) && close(m.rel, 0.075) && close(m.rmse, std::sqrt(0.045)) &&
       m.delta_105 == 0.5 && m.delta_110 == 0.5 && m.delta_125 == 1.0;

  std::mt19937_64 rng(12012);
  std::uniform_real_distribution<double> z(0.3, 4.0), f(0.5, 1.8);
  int monotone = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> gd(64), pd(64);
    for (int k = 0; k < 64; ++k) {
      gd[k] = z(rng);
      pd[k] = gd[k] * f(rng);
    }
    const MetricsReport r = evaluate(DepthMap(8, 8, pd), DepthMap(8, 8, gd));
    monotone += r.delta_105 <= r.delta_110 && r.delta_110 <= r.delta_125;
  }
  return {ok && monotone == 1000,
          fmt("worked example %s; delta monotone on %d/1000 maps", ok ? "matches" : "MISMATCH",
              monotone)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "noise-free oracle round trip", oracle_round_trip},
      {2, "noisy recovery", noisy_recovery},
      {3, "method ordering on rotated scenes", method_ordering},
      {4, "frozen-angle equivalence with gssa", frozen_angles},
      {5, "gssa optimality vs grid search", gssa_optimality},
      {6, "lwlr large-bandwidth limit", lwlr_limit},
      {7, "analytic jacobian vs finite differences", jacobian_check},
      {8, "normalization invariants", normalization_invariants},
      {9, "fluctuation immunity (minmax)", fluctuation_immunity},
      {10, "runtime budget", runtime_budget},
      {11, "sample-count plateau", sample_plateau},
      {12, "metrics arithmetic", metrics_arithmetic},
  };
  const auto t0 = Clock::now();
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  criterion %2d  %-42s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  // Not a criterion: the same jitter experiment under median/MAD scaling.
  const double md = jitter_spread(NormalizationMethod::kMedianMAD, 5, 8, 9009);
  std::printf("INFO  jitter spread under median/MAD normalization: %.3g m\n", md);
  std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed,
              criteria.size(), seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
