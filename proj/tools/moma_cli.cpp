// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver. Talks to the library exclusively through moma.h.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moma/moma.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct DepthDeleter {
  void operator()(moma_depth* p) const { moma_depth_free(p); }
};
struct MaskDeleter {
  void operator()(moma_mask* p) const { moma_mask_free(p); }
};
struct SamplesDeleter {
  void operator()(moma_samples* p) const { moma_samples_free(p); }
};
struct ModelDeleter {
  void operator()(moma_model* p) const { moma_model_free(p); }
};
struct SynthDeleter {
  void operator()(moma_synth* p) const { moma_synth_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { moma_string_free(p); }
};
using DepthPtr = std::unique_ptr<moma_depth, DepthDeleter>;
using MaskPtr = std::unique_ptr<moma_mask, MaskDeleter>;
using SamplesPtr = std::unique_ptr<moma_samples, SamplesDeleter>;
using ModelPtr = std::unique_ptr<moma_model, ModelDeleter>;
using SynthPtr = std::unique_ptr<moma_synth, SynthDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Thrown for library failures; carries the status for the message.
struct Failure {
  moma_status status;
  std::string message;
};

void check(moma_status status, const std::string& context) {
  if (status == MOMA_OK) return;
  throw Failure{status, context + ": " + moma_status_string(status) + ": " +
                            moma_last_error()};
}

struct UsageError {
  std::string message;
};

DepthPtr load_depth(const std::string& path, double scale) {
  moma_depth* out = nullptr;
  check(moma_depth_load(path.c_str(), scale, &out), path);
  return DepthPtr(out);
}

MaskPtr load_optional_mask(const std::string& path) {
  if (path.empty()) return nullptr;
  moma_mask* out = nullptr;
  check(moma_mask_load(path.c_str(), &out), path);
  return MaskPtr(out);
}

moma_method parse_method(const std::string& text) {
  moma_method m;
  if (moma_parse_method(text.c_str(), &m) != MOMA_OK) {
    throw UsageError{"unknown method '" + text + "' (gssa|lwlr|ssra)"};
  }
  return m;
}

moma_norm parse_norm(const std::string& text) {
  moma_norm n;
  if (moma_parse_norm(text.c_str(), &n) != MOMA_OK) {
    throw UsageError{"unknown normalization '" + text + "' (minmax|median|none)"};
  }
  return n;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{MOMA_ERR_IO, "cannot write " + path};
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Shared {
  std::string method = "ssra";
  std::string norm = "minmax";
  std::uint64_t n = 100;
  std::uint64_t seed = 0;
  double bandwidth = 100.0;
  double depth_scale = 0.001;
  std::string mask;
  std::string norm_mask;
  bool json = false;
  bool time = false;
};

// --- calibrate -------------------------------------------------------------

int run_calibrate(const Shared& sh, const std::vector<std::string>& inputs,
                  const std::string& out_path, const std::string& samples_out) {
  if (inputs.size() < 2 || inputs.size() % 2 != 0) {
    throw UsageError{"calibrate expects GT PRED pairs"};
  }
  moma_calib_options opts;
  moma_calib_options_init(&opts);
  opts.method = parse_method(sh.method);
  opts.norm = parse_norm(sh.norm);
  opts.n = sh.n;
  opts.seed = sh.seed;
  opts.bandwidth = sh.bandwidth;

  std::vector<DepthPtr> gts, preds;
  for (std::size_t i = 0; i < inputs.size(); i += 2) {
    gts.push_back(load_depth(inputs[i], sh.depth_scale));
    preds.push_back(load_depth(inputs[i + 1], sh.depth_scale));
  }
  std::vector<const moma_depth*> g, p;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    g.push_back(gts[i].get());
    p.push_back(preds[i].get());
  }
  const MaskPtr mask = load_optional_mask(sh.mask);
  const MaskPtr norm_mask = load_optional_mask(sh.norm_mask);

  moma_model* raw_model = nullptr;
  moma_residuals res{};
  const auto t0 = std::chrono::steady_clock::now();
  check(moma_calibrate(g.data(), p.data(), g.size(), mask.get(), norm_mask.get(),
                       &opts, &raw_model, &res),
        "calibrate");
  const auto t1 = std::chrono::steady_clock::now();
  ModelPtr model(raw_model);
  check(moma_model_save(model.get(), out_path.c_str()), out_path);

  if (!samples_out.empty()) {
    // Re-draw the first scene's samples for inspection; same seed, same draw.
    moma_samples* drawn = nullptr;
    check(moma_sample_points(gts[0].get(), mask.get(), sh.n, sh.seed, &drawn), "sample");
    SamplesPtr s(drawn);
    moma_depth* normed = nullptr;
    check(moma_normalize(preds[0].get(), opts.norm, norm_mask.get(), &normed, nullptr),
          "normalize");
    DepthPtr nmap(normed);
    moma_samples* paired = nullptr;
    check(moma_pair_predictions(s.get(), nmap.get(), &paired), "pair");
    SamplesPtr ps(paired);
    check(moma_samples_save_csv(ps.get(), samples_out.c_str()), samples_out);
  }

  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::cout << "method=" << sh.method << "\n"
            << "norm=" << sh.norm << "\n"
            << "samples=" << moma_model_sample_count(model.get()) << "\n"
            << "residual_mean_abs=" << fmt(res.mean_abs) << "\n"
            << "residual_rms=" << fmt(res.rms) << "\n"
            << "residual_max_abs=" << fmt(res.max_abs) << "\n";
  moma_solver_report rep;
  if (opts.method == MOMA_METHOD_SSRA &&
      moma_model_get_report(model.get(), &rep) == MOMA_OK) {
    std::cout << "solver_init_cost=" << fmt(rep.init_cost) << "\n"
              << "solver_final_cost=" << fmt(rep.final_cost) << "\n"
              << "solver_iterations=" << rep.iterations << "\n"
              << "solver_converged=" << (rep.converged ? "true" : "false") << "\n";
  }
  if (sh.time) std::cout << "calibrate_ms=" << ms << "\n";
  std::cout << "model=" << out_path << "\n";
  return kExitOk;
}

// --- apply -----------------------------------------------------------------

int run_apply(const Shared& sh, const std::string& model_path,
              const std::string& pred_path, const std::string& out_path) {
  moma_model* raw = nullptr;
  check(moma_model_load(model_path.c_str(), &raw), model_path);
  ModelPtr model(raw);
  const DepthPtr pred = load_depth(pred_path, sh.depth_scale);
  const MaskPtr norm_mask = load_optional_mask(sh.norm_mask);

  moma_depth* aligned = nullptr;
  const auto t0 = std::chrono::steady_clock::now();
  check(moma_model_apply(model.get(), pred.get(), norm_mask.get(), &aligned), "apply");
  const auto t1 = std::chrono::steady_clock::now();
  DepthPtr out(aligned);
  check(moma_depth_save(out.get(), out_path.c_str(), sh.depth_scale), out_path);
  if (sh.time) {
    std::cout << "align_ms="
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";
  }
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

int run_eval(const Shared& sh, const std::string& pred_path, const std::string& gt_path,
             bool table, const std::string& out_path) {
  const DepthPtr pred = load_depth(pred_path, sh.depth_scale);
  const DepthPtr gt = load_depth(gt_path, sh.depth_scale);
  const MaskPtr mask = load_optional_mask(sh.mask);
  moma_metrics m;
  check(moma_evaluate(pred.get(), gt.get(), mask.get(), &m), "eval");
  const moma_report_format format =
      sh.json ? MOMA_REPORT_JSON : (table ? MOMA_REPORT_TABLE : MOMA_REPORT_KEY_VALUE);
  char* text = nullptr;
  check(moma_metrics_format(&m, format, &text), "eval");
  StringPtr owned(text);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

// --- sample ----------------------------------------------------------------

int run_sample(const Shared& sh, const std::string& gt_path, const std::string& pred_path,
               const std::string& out_path) {
  const DepthPtr gt = load_depth(gt_path, sh.depth_scale);
  const MaskPtr mask = load_optional_mask(sh.mask);
  moma_samples* raw = nullptr;
  check(moma_sample_points(gt.get(), mask.get(), sh.n, sh.seed, &raw), "sample");
  SamplesPtr samples(raw);
  if (!pred_path.empty()) {
    const DepthPtr pred = load_depth(pred_path, sh.depth_scale);
    const MaskPtr norm_mask = load_optional_mask(sh.norm_mask);
    moma_depth* normed = nullptr;
    check(moma_normalize(pred.get(), parse_norm(sh.norm), norm_mask.get(), &normed,
                         nullptr),
          "normalize");
    DepthPtr nmap(normed);
    moma_samples* paired = nullptr;
    check(moma_pair_predictions(samples.get(), nmap.get(), &paired), "pair");
    samples.reset(paired);
  }
  check(moma_samples_save_csv(samples.get(), out_path.c_str()), out_path);
  std::cout << "samples=" << moma_samples_count(samples.get()) << "\n";
  return kExitOk;
}

// --- synth -----------------------------------------------------------------

int run_synth(const Shared& sh, const std::string& config, const std::string& out_gt,
              const std::string& out_pred, const std::string& out_clean,
              const std::string& out_theta) {
  moma_synth* raw = nullptr;
  check(moma_synth_load(config.c_str(), &raw), config);
  SynthPtr synth(raw);
  moma_depth* clean_raw = nullptr;
  check(moma_synth_render(synth.get(), &clean_raw), "render");
  DepthPtr clean(clean_raw);
  moma_depth* pred_raw = nullptr;
  moma_depth* paired_raw = nullptr;
  check(moma_synth_perturb(synth.get(), clean.get(), sh.seed, &pred_raw, &paired_raw),
        "perturb");
  DepthPtr pred(pred_raw), paired(paired_raw);
  check(moma_depth_save(paired.get(), out_gt.c_str(), sh.depth_scale), out_gt);
  check(moma_depth_save(pred.get(), out_pred.c_str(), sh.depth_scale), out_pred);
  if (!out_clean.empty()) {
    check(moma_depth_save(clean.get(), out_clean.c_str(), sh.depth_scale), out_clean);
  }
  if (!out_theta.empty()) {
    moma_theta th;
    check(moma_synth_theta(synth.get(), &th), "theta");
    std::ostringstream js;
    js << "{\n  \"s\": " << fmt(th.s) << ",\n  \"theta\": " << fmt(th.theta)
       << ",\n  \"phi\": " << fmt(th.phi) << ",\n  \"t3\": " << fmt(th.t3)
       << ",\n  \"cxp\": " << fmt(th.cxp) << ",\n  \"cyp\": " << fmt(th.cyp)
       << ",\n  \"fp\": " << fmt(th.fp) << "\n}\n";
    write_file(out_theta, js.str());
  }
  return kExitOk;
}

// --- bench -----------------------------------------------------------------

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse(item));
  }
  if (out.empty()) throw UsageError{"empty list '" + text + "'"};
  return out;
}

int run_bench(const Shared& sh, const std::string& config, const std::string& methods,
              const std::string& n_sweep, int seeds, const std::string& out_path) {
  moma_synth* raw = nullptr;
  check(moma_synth_load(config.c_str(), &raw), config);
  SynthPtr synth(raw);
  const auto m = parse_list<moma_method>(methods, parse_method);
  const auto ns = parse_list<std::uint64_t>(n_sweep, [](const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || v == 0) throw UsageError{"bad sample count '" + s + "'"};
    return static_cast<std::uint64_t>(v);
  });
  moma_bench_options opts{};
  opts.methods = m.data();
  opts.method_count = m.size();
  opts.n_sweep = ns.data();
  opts.n_count = ns.size();
  opts.seeds = seeds;
  opts.first_seed = sh.seed;
  opts.norm = parse_norm(sh.norm);
  opts.bandwidth = sh.bandwidth;
  char* csv = nullptr;
  check(moma_bench_run(synth.get(), &opts, &csv), "bench");
  StringPtr owned(csv);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric depth from monocular predictions via one-shot calibration"};
  app.require_subcommand(1);
  Shared sh;
  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker threads (default: MOMA_THREADS or hardware concurrency)")
      ->check(CLI::NonNegativeNumber);

  auto add_scale = [&](CLI::App* cmd) {
    cmd->add_option("--depth-scale", sh.depth_scale, "Meters per 16-bit PNG unit")
        ->check(CLI::PositiveNumber);
  };
  auto add_sampling = [&](CLI::App* cmd) {
    cmd->add_option("--n", sh.n, "Number of ground-truth samples")
        ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()));
    cmd->add_option("--seed", sh.seed, "Sampling seed");
    cmd->add_option("--mask", sh.mask, "Mask PNG restricting sampled pixels");
  };
  const std::vector<std::string> methods{"gssa", "lwlr", "ssra"};
  const std::vector<std::string> norms{"minmax", "median", "none"};

  // calibrate
  std::vector<std::string> calib_inputs;
  std::string model_out = "model.json";
  std::string samples_out;
  auto* calibrate = app.add_subcommand("calibrate", "Fit alignment parameters");
  calibrate->add_option("inputs", calib_inputs, "GT PRED [GT PRED ...]")->required();
  calibrate->add_option("--method", sh.method, "gssa|lwlr|ssra")
      ->check(CLI::IsMember(methods));
  calibrate->add_option("--norm", sh.norm, "minmax|median|none")->check(CLI::IsMember(norms));
  calibrate->add_option("--bandwidth", sh.bandwidth, "LWLR kernel bandwidth (pixels)")
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--norm-mask", sh.norm_mask, "Mask for normalization statistics");
  calibrate->add_option("-o,--out", model_out, "Model file");
  calibrate->add_option("--samples-out", samples_out, "Write the first scene's samples");
  calibrate->add_flag("--time", sh.time, "Report calibration wall-clock");
  add_sampling(calibrate);
  add_scale(calibrate);

  // apply
  std::string apply_model, apply_pred, apply_out;
  auto* apply = app.add_subcommand("apply", "Align a raw prediction with a model");
  apply->add_option("model", apply_model, "Model file")->required();
  apply->add_option("pred", apply_pred, "Raw prediction")->required();
  apply->add_option("-o,--out", apply_out, "Aligned depth output")->required();
  apply->add_option("--norm-mask", sh.norm_mask, "Mask for normalization statistics");
  apply->add_flag("--time", sh.time, "Report normalize+align wall-clock");
  add_scale(apply);

  // eval
  std::string eval_pred, eval_gt, eval_out;
  bool table = false;
  auto* eval = app.add_subcommand("eval", "Depth metrics of a prediction against ground truth");
  eval->add_option("pred", eval_pred, "Predicted depth")->required();
  eval->add_option("gt", eval_gt, "Ground-truth depth")->required();
  eval->add_option("--mask", sh.mask, "Evaluation mask");
  eval->add_flag("--json", sh.json, "Emit JSON");
  eval->add_flag("--table", table, "Emit a table row");
  eval->add_option("-o,--out", eval_out, "Write the report to a file");
  add_scale(eval);

  // sample
  std::string sample_gt, sample_pred, sample_out;
  auto* sample = app.add_subcommand("sample", "Draw calibration samples to CSV");
  sample->add_option("gt", sample_gt, "Ground-truth depth")->required();
  sample->add_option("--pred", sample_pred, "Pair with this (normalized) prediction");
  sample->add_option("--norm", sh.norm, "minmax|median|none")->check(CLI::IsMember(norms));
  sample->add_option("--norm-mask", sh.norm_mask, "Mask for normalization statistics");
  sample->add_option("-o,--out", sample_out, "CSV output")->required();
  add_sampling(sample);
  add_scale(sample);

  // synth
  std::string synth_config, synth_gt, synth_pred, synth_clean, synth_theta;
  auto* synth = app.add_subcommand("synth", "Render a synthetic gt/prediction pair");
  synth->add_option("config", synth_config, "Scene configuration")->required();
  synth->add_option("--out-gt", synth_gt, "Paired ground truth (with noise)")->required();
  synth->add_option("--out-pred", synth_pred, "Pseudo-prediction")->required();
  synth->add_option("--out-clean", synth_clean, "Noise-free ground truth");
  synth->add_option("--out-theta", synth_theta, "Generating parameters (JSON)");
  synth->add_option("--seed", sh.seed, "Noise seed");
  add_scale(synth);

  // bench
  std::string bench_config, bench_methods = "gssa,lwlr,ssra",
                            bench_n = "20,50,100,400,1000", bench_out;
  int bench_seeds = 5;
  auto* bench = app.add_subcommand("bench", "Sample-count sweep over a synthetic scene");
  bench->add_option("config", bench_config, "Scene configuration")->required();
  bench->add_option("--methods", bench_methods, "Comma-separated methods");
  bench->add_option("--n-sweep", bench_n, "Comma-separated sample counts");
  bench->add_option("--seeds", bench_seeds, "Seeds per configuration")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", sh.seed, "First seed");
  bench->add_option("--norm", sh.norm, "minmax|median|none")->check(CLI::IsMember(norms));
  bench->add_option("--bandwidth", sh.bandwidth, "LWLR kernel bandwidth (pixels)")
      ->check(CLI::PositiveNumber);
  bench->add_option("-o,--out", bench_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (threads > 0) moma_set_threads(threads);
  try {
    if (*calibrate) return run_calibrate(sh, calib_inputs, model_out, samples_out);
    if (*apply) return run_apply(sh, apply_model, apply_pred, apply_out);
    if (*eval) return run_eval(sh, eval_pred, eval_gt, table, eval_out);
    if (*sample) return run_sample(sh, sample_gt, sample_pred, sample_out);
    if (*synth) {
      return run_synth(sh, synth_config, synth_gt, synth_pred, synth_clean, synth_theta);
    }
    if (*bench) {
      if (bench->count("--norm") == 0) sh.norm = "none";
      return run_bench(sh, bench_config, bench_methods, bench_n, bench_seeds, bench_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << "\n";
    return kExitUsage;
  } catch (const Failure& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
