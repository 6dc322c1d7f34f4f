// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/moma.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "moma/bench.hpp"
#include "moma/error.hpp"
#include "moma/io.hpp"
#include "moma/metrics.hpp"
#include "moma/model.hpp"
#include "moma/normalize.hpp"
#include "moma/parallel.hpp"
#include "moma/synth.hpp"

struct moma_depth {
  moma::DepthMap map;
};
struct moma_mask {
  moma::Mask mask;
};
struct moma_samples {
  moma::SampleSet set;
};
struct moma_model {
  moma::AlignmentModel model;
};
struct moma_synth {
  moma::SynthConfig config;
};

namespace {

thread_local std::string g_last_error;

moma_status to_status(moma::ErrorCode code) {
  return static_cast<moma_status>(static_cast<int>(code));
}

template <typename Fn>
moma_status guard(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return MOMA_OK;
  } catch (const moma::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return MOMA_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) moma::fail(moma::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

moma::NormalizationMethod to_cpp(moma_norm n) {
  switch (n) {
    case MOMA_NORM_MINMAX: return moma::NormalizationMethod::kMinMax;
    case MOMA_NORM_MEDIAN: return moma::NormalizationMethod::kMedianMAD;
    case MOMA_NORM_NONE: return moma::NormalizationMethod::kNone;
  }
  moma::fail(moma::ErrorCode::kInvalidArgument, "unknown normalization");
}

moma_norm to_c(moma::NormalizationMethod n) {
  switch (n) {
    case moma::NormalizationMethod::kMinMax: return MOMA_NORM_MINMAX;
    case moma::NormalizationMethod::kMedianMAD: return MOMA_NORM_MEDIAN;
    case moma::NormalizationMethod::kNone: return MOMA_NORM_NONE;
  }
  return MOMA_NORM_NONE;
}

moma::AlignMethod to_cpp(moma_method m) {
  switch (m) {
    case MOMA_METHOD_GSSA: return moma::AlignMethod::kGssa;
    case MOMA_METHOD_LWLR: return moma::AlignMethod::kLwlr;
    case MOMA_METHOD_SSRA: return moma::AlignMethod::kSsra;
  }
  moma::fail(moma::ErrorCode::kInvalidArgument, "unknown method");
}

moma_method to_c(moma::AlignMethod m) {
  switch (m) {
    case moma::AlignMethod::kGssa: return MOMA_METHOD_GSSA;
    case moma::AlignMethod::kLwlr: return MOMA_METHOD_LWLR;
    case moma::AlignMethod::kSsra: return MOMA_METHOD_SSRA;
  }
  return MOMA_METHOD_SSRA;
}

moma_theta to_c(const moma::ThetaParams& t) {
  return {t.s, t.theta, t.phi, t.t3, t.cxp, t.cyp, t.fp};
}

moma::CalibrationOptions to_cpp(const moma_calib_options& o) {
  moma::CalibrationOptions c;
  c.method = to_cpp(o.method);
  c.norm = to_cpp(o.norm);
  c.n = static_cast<std::size_t>(o.n);
  c.seed = o.seed;
  c.lwlr.bandwidth = o.bandwidth;
  c.lwlr.epsilon = o.epsilon;
  c.solver.max_iter = o.max_iter;
  c.solver.cost_tol = o.cost_tol;
  c.solver.step_tol = o.step_tol;
  c.solver.init_damping = o.init_damping;
  return c;
}

void write_residuals(const moma::Calibration& cal, moma_residuals* out) {
  if (out) *out = {cal.residuals.mean_abs, cal.residuals.rms, cal.residuals.max_abs};
}

}  // namespace

extern "C" {

const char* moma_version(void) { return MOMA_VERSION_STRING; }

const char* moma_status_string(moma_status status) {
  if (status == MOMA_OK) return "OK";
  if (status == MOMA_ERR_INTERNAL) return "InternalError";
  if (status >= MOMA_ERR_INVALID_ARGUMENT && status <= MOMA_ERR_PARSE) {
    return moma::error_code_name(static_cast<moma::ErrorCode>(status));
  }
  return "Unknown";
}

const char* moma_last_error(void) { return g_last_error.c_str(); }

void moma_set_threads(int32_t threads) { moma::set_thread_count(threads); }

void moma_string_free(char* str) { std::free(str); }

moma_status moma_parse_method(const char* text, moma_method* out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    const auto m = moma::parse_align_method(text);
    if (!m) {
      moma::fail(moma::ErrorCode::kInvalidArgument,
                 std::string("unknown method '") + text + "'");
    }
    *out = to_c(*m);
  });
}

moma_status moma_parse_norm(const char* text, moma_norm* out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    const auto n = moma::parse_normalization(text);
    if (!n) {
      moma::fail(moma::ErrorCode::kInvalidArgument,
                 std::string("unknown normalization '") + text + "'");
    }
    *out = to_c(*n);
  });
}

// --- depth ---------------------------------------------------------------

moma_status moma_depth_create(int32_t width, int32_t height, const double* data,
                              moma_depth** out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    if (width < 1 || height < 1) {
      moma::fail(moma::ErrorCode::kInvalidArgument, "width and height must be >= 1");
    }
    std::vector<double> v(data, data + static_cast<std::size_t>(width) * height);
    *out = new moma_depth{moma::DepthMap(width, height, std::move(v))};
  });
}

moma_status moma_depth_create_measured(int32_t width, int32_t height,
                                       const double* data, moma_depth** out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    if (width < 1 || height < 1) {
      moma::fail(moma::ErrorCode::kInvalidArgument, "width and height must be >= 1");
    }
    std::vector<double> v(data, data + static_cast<std::size_t>(width) * height);
    *out = new moma_depth{moma::DepthMap::from_measurements(width, height, std::move(v))};
  });
}

moma_status moma_depth_load(const char* path, double depth_scale, moma_depth** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new moma_depth{moma::load_depth(path, depth_scale)};
  });
}

moma_status moma_depth_save(const moma_depth* map, const char* path,
                            double depth_scale) {
  return guard([&] {
    require(map, "map");
    require(path, "path");
    moma::save_depth(path, map->map, depth_scale);
  });
}

int32_t moma_depth_width(const moma_depth* map) { return map ? map->map.width() : 0; }
int32_t moma_depth_height(const moma_depth* map) { return map ? map->map.height() : 0; }

moma_status moma_depth_copy(const moma_depth* map, double* data, size_t len) {
  return guard([&] {
    require(map, "map");
    require(data, "data");
    if (len != map->map.size()) {
      moma::fail(moma::ErrorCode::kDimensionMismatch, "buffer length != width*height");
    }
    std::memcpy(data, map->map.data().data(), len * sizeof(double));
  });
}

void moma_depth_free(moma_depth* map) { delete map; }

// --- mask ----------------------------------------------------------------

moma_status moma_mask_create(int32_t width, int32_t height, const uint8_t* bits,
                             moma_mask** out) {
  return guard([&] {
    require(bits, "bits");
    require(out, "out");
    if (width < 1 || height < 1) {
      moma::fail(moma::ErrorCode::kInvalidArgument, "width and height must be >= 1");
    }
    std::vector<std::uint8_t> v(bits, bits + static_cast<std::size_t>(width) * height);
    *out = new moma_mask{moma::Mask(width, height, std::move(v))};
  });
}

moma_status moma_mask_load(const char* path, moma_mask** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new moma_mask{moma::load_mask(path)};
  });
}

void moma_mask_free(moma_mask* mask) { delete mask; }

// --- samples -------------------------------------------------------------

moma_status moma_sample_points(const moma_depth* gt, const moma_mask* mask,
                               uint64_t n, uint64_t seed, moma_samples** out) {
  return guard([&] {
    require(gt, "gt");
    require(out, "out");
    *out = new moma_samples{moma::sample_points(gt->map, mask ? &mask->mask : nullptr,
                                                static_cast<std::size_t>(n), seed)};
  });
}

moma_status moma_pair_predictions(const moma_samples* samples, const moma_depth* pred,
                                  moma_samples** out) {
  return guard([&] {
    require(samples, "samples");
    require(pred, "pred");
    require(out, "out");
    *out = new moma_samples{moma::pair_predictions(samples->set, pred->map)};
  });
}

moma_status moma_samples_load_csv(const char* path, moma_samples** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new moma_samples{moma::load_samples_csv(path)};
  });
}

moma_status moma_samples_save_csv(const moma_samples* samples, const char* path) {
  return guard([&] {
    require(samples, "samples");
    require(path, "path");
    moma::save_samples_csv(path, samples->set);
  });
}

size_t moma_samples_count(const moma_samples* samples) {
  return samples ? samples->set.size() : 0;
}

moma_status moma_samples_get(const moma_samples* samples, size_t index,
                             moma_sample* out) {
  return guard([&] {
    require(samples, "samples");
    require(out, "out");
    if (index >= samples->set.size()) {
      moma::fail(moma::ErrorCode::kInvalidArgument, "sample index out of range");
    }
    const moma::SamplePoint& p = samples->set[index];
    *out = {p.u, p.v, p.z_c, p.z_p};
  });
}

void moma_samples_free(moma_samples* samples) { delete samples; }

// --- normalization -------------------------------------------------------

moma_status moma_normalize(const moma_depth* pred, moma_norm norm,
                           const moma_mask* stats_mask, moma_depth** out,
                           moma_norm_stats* stats) {
  return guard([&] {
    require(pred, "pred");
    require(out, "out");
    auto [map, s] =
        moma::normalize(pred->map, to_cpp(norm), stats_mask ? &stats_mask->mask : nullptr);
    if (stats) *stats = {s.median, s.mad, s.z_min, s.z_max};
    *out = new moma_depth{std::move(map)};
  });
}

// --- models --------------------------------------------------------------

void moma_calib_options_init(moma_calib_options* opts) {
  if (!opts) return;
  const moma::CalibrationOptions d;
  opts->method = to_c(d.method);
  opts->norm = to_c(d.norm);
  opts->n = d.n;
  opts->seed = d.seed;
  opts->bandwidth = d.lwlr.bandwidth;
  opts->epsilon = d.lwlr.epsilon;
  opts->max_iter = d.solver.max_iter;
  opts->cost_tol = d.solver.cost_tol;
  opts->step_tol = d.solver.step_tol;
  opts->init_damping = d.solver.init_damping;
}

moma_status moma_calibrate(const moma_depth* const* gts,
                           const moma_depth* const* preds, size_t count,
                           const moma_mask* mask, const moma_mask* norm_mask,
                           const moma_calib_options* opts, moma_model** out,
                           moma_residuals* residuals) {
  return guard([&] {
    require(gts, "gts");
    require(preds, "preds");
    require(opts, "opts");
    require(out, "out");
    std::vector<moma::DepthMap> g;
    std::vector<moma::DepthMap> p;
    for (size_t i = 0; i < count; ++i) {
      require(gts[i], "gts[i]");
      require(preds[i], "preds[i]");
      g.push_back(gts[i]->map);
      p.push_back(preds[i]->map);
    }
    const moma::Calibration cal =
        moma::calibrate(g, p, mask ? &mask->mask : nullptr, to_cpp(*opts),
                        norm_mask ? &norm_mask->mask : nullptr);
    write_residuals(cal, residuals);
    *out = new moma_model{cal.model};
  });
}

moma_status moma_calibrate_samples(const moma_samples* samples, int32_t width,
                                   int32_t height, const moma_calib_options* opts,
                                   moma_model** out, moma_residuals* residuals) {
  return guard([&] {
    require(samples, "samples");
    require(opts, "opts");
    require(out, "out");
    const moma::Calibration cal =
        moma::calibrate_samples(samples->set, {width, height}, to_cpp(*opts));
    write_residuals(cal, residuals);
    *out = new moma_model{cal.model};
  });
}

moma_status moma_model_apply(const moma_model* model, const moma_depth* raw_pred,
                             const moma_mask* norm_mask, moma_depth** out) {
  return guard([&] {
    require(model, "model");
    require(raw_pred, "raw_pred");
    require(out, "out");
    *out = new moma_depth{moma::apply_model(model->model, raw_pred->map,
                                            norm_mask ? &norm_mask->mask : nullptr)};
  });
}

moma_status moma_model_load(const char* path, moma_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new moma_model{moma::load_model(path)};
  });
}

moma_status moma_model_save(const moma_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    moma::save_model(path, model->model);
  });
}

moma_status moma_model_parse(const char* json, moma_model** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    *out = new moma_model{moma::model_from_json(json)};
  });
}

moma_status moma_model_to_json(const moma_model* model, char** out) {
  return guard([&] {
    require(model, "model");
    require(out, "out");
    *out = dup_string(moma::model_to_json(model->model));
  });
}

moma_method moma_model_method(const moma_model* model) {
  return model ? to_c(model->model.method()) : MOMA_METHOD_SSRA;
}

moma_norm moma_model_norm(const moma_model* model) {
  return model ? to_c(model->model.norm) : MOMA_NORM_NONE;
}

void moma_model_dims(const moma_model* model, int32_t* width, int32_t* height) {
  if (width) *width = model ? model->model.calib_dims.width : 0;
  if (height) *height = model ? model->model.calib_dims.height : 0;
}

uint64_t moma_model_sample_count(const moma_model* model) {
  return model ? model->model.sample_count : 0;
}

moma_status moma_model_get_gssa(const moma_model* model, double* s, double* t) {
  return guard([&] {
    require(model, "model");
    const auto* p = std::get_if<moma::GlobalScaleShift>(&model->model.payload);
    if (!p) moma::fail(moma::ErrorCode::kInvalidArgument, "model is not gssa");
    if (s) *s = p->s;
    if (t) *t = p->t;
  });
}

moma_status moma_model_get_ssra(const moma_model* model, moma_theta* theta) {
  return guard([&] {
    require(model, "model");
    require(theta, "theta");
    const auto* p = std::get_if<moma::ThetaParams>(&model->model.payload);
    if (!p) moma::fail(moma::ErrorCode::kInvalidArgument, "model is not ssra");
    *theta = to_c(*p);
  });
}

moma_status moma_model_get_report(const moma_model* model, moma_solver_report* report) {
  return guard([&] {
    require(model, "model");
    require(report, "report");
    if (!model->model.report) {
      moma::fail(moma::ErrorCode::kInvalidArgument, "model has no solver report");
    }
    const moma::SolverReport& r = *model->model.report;
    *report = {r.init_cost, r.final_cost, r.iterations, r.converged ? 1 : 0};
  });
}

void moma_model_free(moma_model* model) { delete model; }

// --- metrics -------------------------------------------------------------

moma_status moma_evaluate(const moma_depth* pred, const moma_depth* gt,
                          const moma_mask* mask, moma_metrics* out) {
  return guard([&] {
    require(pred, "pred");
    require(gt, "gt");
    require(out, "out");
    const moma::MetricsReport r =
        moma::evaluate(pred->map, gt->map, mask ? &mask->mask : nullptr);
    *out = {r.rmse, r.rel, r.mae, r.delta_105, r.delta_110, r.delta_125, r.pixel_count};
  });
}

moma_status moma_metrics_format(const moma_metrics* m, moma_report_format format,
                                char** out) {
  return guard([&] {
    require(m, "metrics");
    require(out, "out");
    moma::MetricsReport r;
    r.rmse = m->rmse;
    r.rel = m->rel;
    r.mae = m->mae;
    r.delta_105 = m->delta_105;
    r.delta_110 = m->delta_110;
    r.delta_125 = m->delta_125;
    r.pixel_count = static_cast<std::size_t>(m->pixel_count);
    switch (format) {
      case MOMA_REPORT_KEY_VALUE: *out = dup_string(moma::to_key_value(r)); return;
      case MOMA_REPORT_JSON: *out = dup_string(moma::to_json(r)); return;
      case MOMA_REPORT_TABLE: *out = dup_string(moma::to_table(r)); return;
    }
    moma::fail(moma::ErrorCode::kInvalidArgument, "unknown report format");
  });
}

// --- synth ---------------------------------------------------------------

moma_status moma_synth_load(const char* path, moma_synth** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new moma_synth{moma::load_synth_config(path)};
  });
}

moma_status moma_synth_parse(const char* text, moma_synth** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new moma_synth{moma::parse_synth_config(text)};
  });
}

moma_status moma_synth_render(const moma_synth* synth, moma_depth** gt) {
  return guard([&] {
    require(synth, "synth");
    require(gt, "gt");
    *gt = new moma_depth{moma::render_scene(synth->config.scene)};
  });
}

moma_status moma_synth_perturb(const moma_synth* synth, const moma_depth* gt,
                               uint64_t seed, moma_depth** pred,
                               moma_depth** gt_paired) {
  return guard([&] {
    require(synth, "synth");
    require(gt, "gt");
    require(pred, "pred");
    moma::Perturbed p = moma::perturb(gt->map, synth->config.perturbation, seed);
    auto* pred_handle = new moma_depth{std::move(p.pred)};
    if (gt_paired) *gt_paired = new moma_depth{std::move(p.gt_paired)};
    *pred = pred_handle;
  });
}

moma_status moma_synth_theta(const moma_synth* synth, moma_theta* theta) {
  return guard([&] {
    require(synth, "synth");
    require(theta, "theta");
    *theta = to_c(synth->config.perturbation.theta_star);
  });
}

void moma_synth_free(moma_synth* synth) { delete synth; }

moma_status moma_bench_run(const moma_synth* synth, const moma_bench_options* opts,
                           char** csv) {
  return guard([&] {
    require(synth, "synth");
    require(opts, "opts");
    require(csv, "csv");
    moma::BenchOptions b;
    if (opts->methods && opts->method_count > 0) {
      b.methods.clear();
      for (size_t i = 0; i < opts->method_count; ++i) b.methods.push_back(to_cpp(opts->methods[i]));
    }
    if (opts->n_sweep && opts->n_count > 0) {
      b.n_sweep.assign(opts->n_sweep, opts->n_sweep + opts->n_count);
    }
    b.seeds = opts->seeds;
    b.first_seed = opts->first_seed;
    b.norm = to_cpp(opts->norm);
    if (opts->bandwidth > 0.0) b.lwlr.bandwidth = opts->bandwidth;
    *csv = dup_string(moma::bench_to_csv(moma::run_bench(synth->config, b)));
  });
}

}  // extern "C"
