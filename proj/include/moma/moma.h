/* Copyright 2026 The moma-depth Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to libmoma: metric depth recovery from affine-invariant
 * monocular depth predictions by one-shot calibration against sparse ground
 * truth.
 *
 * Conventions:
 *  - Every fallible call returns a moma_status; MOMA_OK is zero. On failure
 *    moma_last_error() returns a message for the calling thread, valid until
 *    that thread's next libmoma call.
 *  - Objects are opaque handles created by moma_*_create/load/... and
 *    released with the matching moma_*_free. Free functions accept NULL.
 *  - Output handles are only written on success.
 *  - Strings returned through char** are released with moma_string_free.
 *  - Depth values are doubles in meters; NaN marks a missing pixel. Rasters
 *    are row-major, index = v * width + u.
 */
#ifndef MOMA_MOMA_H_
#define MOMA_MOMA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MOMA_BUILDING_LIBRARY)
#define MOMA_API __declspec(dllexport)
#else
#define MOMA_API __declspec(dllimport)
#endif
#else
#define MOMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum moma_status {
  MOMA_OK = 0,
  MOMA_ERR_INVALID_ARGUMENT = 1,
  MOMA_ERR_NO_VALID_PIXELS = 2,
  MOMA_ERR_DIMENSION_MISMATCH = 3,
  MOMA_ERR_EMPTY_AFTER_PAIRING = 4,
  MOMA_ERR_DEGENERATE_RANGE = 5,
  MOMA_ERR_DEGENERATE_MAD = 6,
  MOMA_ERR_DEGENERATE_DESIGN = 7,
  MOMA_ERR_ZERO_FOCAL = 8,
  MOMA_ERR_NON_FINITE = 9,
  MOMA_ERR_EMPTY_SCENE = 10,
  MOMA_ERR_DEGENERATE_G = 11,
  MOMA_ERR_IO = 12,
  MOMA_ERR_PARSE = 13,
  MOMA_ERR_INTERNAL = 100
} moma_status;

typedef enum moma_method {
  MOMA_METHOD_GSSA = 0, /* global scale-shift */
  MOMA_METHOD_LWLR = 1, /* locally weighted linear regression */
  MOMA_METHOD_SSRA = 2  /* scale-shift-rotation alignment */
} moma_method;

typedef enum moma_norm {
  MOMA_NORM_MINMAX = 0,
  MOMA_NORM_MEDIAN = 1,
  MOMA_NORM_NONE = 2
} moma_norm;

typedef enum moma_report_format {
  MOMA_REPORT_KEY_VALUE = 0,
  MOMA_REPORT_JSON = 1,
  MOMA_REPORT_TABLE = 2
} moma_report_format;

typedef struct moma_depth moma_depth;
typedef struct moma_mask moma_mask;
typedef struct moma_samples moma_samples;
typedef struct moma_model moma_model;
typedef struct moma_synth moma_synth;

typedef struct moma_sample {
  int32_t u;
  int32_t v;
  double z_c;
  double z_p; /* NaN when unpaired */
} moma_sample;

typedef struct moma_theta {
  double s;
  double theta;
  double phi;
  double t3;
  double cxp;
  double cyp;
  double fp;
} moma_theta;

typedef struct moma_norm_stats {
  double median;
  double mad;
  double z_min;
  double z_max;
} moma_norm_stats;

typedef struct moma_solver_report {
  double init_cost;
  double final_cost;
  int32_t iterations;
  int32_t converged;
} moma_solver_report;

typedef struct moma_residuals {
  double mean_abs;
  double rms;
  double max_abs;
} moma_residuals;

typedef struct moma_metrics {
  double rmse;
  double rel;
  double mae;
  double delta_105;
  double delta_110;
  double delta_125;
  uint64_t pixel_count;
} moma_metrics;

typedef struct moma_calib_options {
  moma_method method;
  moma_norm norm;
  uint64_t n;
  uint64_t seed;
  double bandwidth; /* lwlr, pixels */
  double epsilon;   /* lwlr ridge */
  int32_t max_iter; /* ssra solver */
  double cost_tol;
  double step_tol;
  double init_damping;
} moma_calib_options;

typedef struct moma_bench_options {
  const moma_method* methods;
  size_t method_count;
  const uint64_t* n_sweep;
  size_t n_count;
  int32_t seeds;
  uint64_t first_seed;
  moma_norm norm;
  double bandwidth;
} moma_bench_options;

/* --- library --------------------------------------------------------- */

MOMA_API const char* moma_version(void);
MOMA_API const char* moma_status_string(moma_status status);
MOMA_API const char* moma_last_error(void);
/* 0 restores the default: MOMA_THREADS, else hardware concurrency. */
MOMA_API void moma_set_threads(int32_t threads);
MOMA_API void moma_string_free(char* str);

MOMA_API moma_status moma_parse_method(const char* text, moma_method* out);
MOMA_API moma_status moma_parse_norm(const char* text, moma_norm* out);

/* --- depth maps ------------------------------------------------------ */

/* Values are stored as given; non-finite entries become missing. */
MOMA_API moma_status moma_depth_create(int32_t width, int32_t height,
                                       const double* data, moma_depth** out);
/* Sensor semantics: 0.0 and non-finite entries become missing. */
MOMA_API moma_status moma_depth_create_measured(int32_t width, int32_t height,
                                                const double* data,
                                                moma_depth** out);
/* .pfm or 16-bit .png; depth_scale is meters per PNG unit. */
MOMA_API moma_status moma_depth_load(const char* path, double depth_scale,
                                     moma_depth** out);
MOMA_API moma_status moma_depth_save(const moma_depth* map, const char* path,
                                     double depth_scale);
MOMA_API int32_t moma_depth_width(const moma_depth* map);
MOMA_API int32_t moma_depth_height(const moma_depth* map);
/* len must equal width * height. */
MOMA_API moma_status moma_depth_copy(const moma_depth* map, double* data,
                                     size_t len);
MOMA_API void moma_depth_free(moma_depth* map);

/* --- masks ----------------------------------------------------------- */

MOMA_API moma_status moma_mask_create(int32_t width, int32_t height,
                                      const uint8_t* bits, moma_mask** out);
MOMA_API moma_status moma_mask_load(const char* path, moma_mask** out);
MOMA_API void moma_mask_free(moma_mask* mask);

/* --- samples --------------------------------------------------------- */

/* mask may be NULL. */
MOMA_API moma_status moma_sample_points(const moma_depth* gt,
                                        const moma_mask* mask, uint64_t n,
                                        uint64_t seed, moma_samples** out);
MOMA_API moma_status moma_pair_predictions(const moma_samples* samples,
                                           const moma_depth* pred,
                                           moma_samples** out);
MOMA_API moma_status moma_samples_load_csv(const char* path,
                                           moma_samples** out);
MOMA_API moma_status moma_samples_save_csv(const moma_samples* samples,
                                           const char* path);
MOMA_API size_t moma_samples_count(const moma_samples* samples);
MOMA_API moma_status moma_samples_get(const moma_samples* samples,
                                      size_t index, moma_sample* out);
MOMA_API void moma_samples_free(moma_samples* samples);

/* --- normalization --------------------------------------------------- */

/* stats_mask and stats may be NULL. */
MOMA_API moma_status moma_normalize(const moma_depth* pred, moma_norm norm,
                                    const moma_mask* stats_mask,
                                    moma_depth** out, moma_norm_stats* stats);

/* --- calibration models ---------------------------------------------- */

MOMA_API void moma_calib_options_init(moma_calib_options* opts);

/* Calibrates from `count` (ground truth, raw prediction) pairs taken at one
 * camera pose. mask, norm_mask, residuals may be NULL. */
MOMA_API moma_status moma_calibrate(const moma_depth* const* gts,
                                    const moma_depth* const* preds,
                                    size_t count, const moma_mask* mask,
                                    const moma_mask* norm_mask,
                                    const moma_calib_options* opts,
                                    moma_model** out,
                                    moma_residuals* residuals);
/* Fits already normalized, paired samples. */
MOMA_API moma_status moma_calibrate_samples(const moma_samples* samples,
                                            int32_t width, int32_t height,
                                            const moma_calib_options* opts,
                                            moma_model** out,
                                            moma_residuals* residuals);
MOMA_API moma_status moma_model_apply(const moma_model* model,
                                      const moma_depth* raw_pred,
                                      const moma_mask* norm_mask,
                                      moma_depth** out);
MOMA_API moma_status moma_model_load(const char* path, moma_model** out);
MOMA_API moma_status moma_model_save(const moma_model* model, const char* path);
MOMA_API moma_status moma_model_parse(const char* json, moma_model** out);
MOMA_API moma_status moma_model_to_json(const moma_model* model, char** out);
MOMA_API moma_method moma_model_method(const moma_model* model);
MOMA_API moma_norm moma_model_norm(const moma_model* model);
MOMA_API void moma_model_dims(const moma_model* model, int32_t* width,
                              int32_t* height);
MOMA_API uint64_t moma_model_sample_count(const moma_model* model);
/* Fail with MOMA_ERR_INVALID_ARGUMENT when the model holds another method. */
MOMA_API moma_status moma_model_get_gssa(const moma_model* model, double* s,
                                         double* t);
MOMA_API moma_status moma_model_get_ssra(const moma_model* model,
                                         moma_theta* theta);
MOMA_API moma_status moma_model_get_report(const moma_model* model,
                                           moma_solver_report* report);
MOMA_API void moma_model_free(moma_model* model);

/* --- metrics --------------------------------------------------------- */

MOMA_API moma_status moma_evaluate(const moma_depth* pred,
                                   const moma_depth* gt,
                                   const moma_mask* mask, moma_metrics* out);
MOMA_API moma_status moma_metrics_format(const moma_metrics* metrics,
                                         moma_report_format format, char** out);

/* --- synthetic scenes ------------------------------------------------ */

MOMA_API moma_status moma_synth_load(const char* path, moma_synth** out);
MOMA_API moma_status moma_synth_parse(const char* text, moma_synth** out);
MOMA_API moma_status moma_synth_render(const moma_synth* synth,
                                       moma_depth** gt);
/* gt_paired may be NULL. */
MOMA_API moma_status moma_synth_perturb(const moma_synth* synth,
                                        const moma_depth* gt, uint64_t seed,
                                        moma_depth** pred,
                                        moma_depth** gt_paired);
MOMA_API moma_status moma_synth_theta(const moma_synth* synth,
                                      moma_theta* theta);
MOMA_API void moma_synth_free(moma_synth* synth);

MOMA_API moma_status moma_bench_run(const moma_synth* synth,
                                    const moma_bench_options* opts,
                                    char** csv);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* MOMA_MOMA_H_ */
