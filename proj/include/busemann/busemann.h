/* C interface of the busemann library. */
#ifndef BUSEMANN_H
#define BUSEMANN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BM_API __declspec(dllexport)
#else
#define BM_API __attribute__((visibility("default")))
#endif

typedef enum bm_status {
  BM_OK = 0,
  BM_ERR_INVALID_ARGUMENT = 1,
  BM_ERR_DEGENERATE = 2,
  BM_ERR_UNSUPPORTED_BACKEND = 3,
  BM_ERR_CONFIG = 4,
  BM_ERR_IO = 5,
  BM_ERR_INTERNAL = 6
} bm_status;

/* Message of the last failing call on this thread; "" if none. */
BM_API const char* bm_last_error(void);
BM_API const char* bm_version(void);

typedef struct bm_scenario bm_scenario;

/* Builds the scenario described by a run configuration. */
BM_API bm_status bm_scenario_from_file(const char* config_path, bm_scenario** out);
BM_API bm_status bm_scenario_from_json(const char* config_json, bm_scenario** out);
BM_API void bm_scenario_free(bm_scenario* s);

BM_API size_t bm_scenario_dim(const bm_scenario* s);
/* Writes dim coordinates. */
BM_API bm_status bm_scenario_basepoint(const bm_scenario* s, double* out);
BM_API const char* bm_scenario_backend(const bm_scenario* s);

/* d(x, y) with its standard error (0 for exact backends). x, y have dim entries. */
BM_API bm_status bm_seg_mass(const bm_scenario* s, const double* x, const double* y, double* value, double* std_error);
BM_API bm_status bm_transversal_integral(const bm_scenario* s, const double* x, const double* y, double* value,
                                         double* std_error);
/* f(x) and per-coordinate standard errors; std_error may be NULL. */
BM_API bm_status bm_embed(const bm_scenario* s, const double* x, double* out, double* std_error);

/* Grid CSV of f over [lo, hi]; lo and hi may be NULL for the plan region. */
BM_API bm_status bm_grid_export(const bm_scenario* s, size_t resolution, const double* lo, const double* hi,
                                const char* csv_path);

/* Runs a configuration and writes its report under out_dir. exit_code is
   0 when every audit passes and 2 otherwise. report_path receives the path
   of the report (may be NULL); its buffer holds report_path_size bytes. */
BM_API bm_status bm_run_config(const char* config_path, const char* out_dir, int* exit_code, char* report_path,
                               size_t report_path_size);

/* Oracle calibration of the kmw constant; writes a JSON file at out_path
   (skipped when NULL). exit_code is 2 on an inconsistent fit. */
BM_API bm_status bm_calibrate(size_t dim, uint64_t budget, uint64_t seed, const char* out_path, double* value,
                              double* half_width, int* low_sample_warning, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
