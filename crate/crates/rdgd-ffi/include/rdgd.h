/* C interface to the rdgd corruption-tolerant distributed gradient descent simulator. */

#ifndef RDGD_H
#define RDGD_H

/* Generated by cbindgen from rdgd-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every FFI call.
 */
typedef enum RdgdStatus {
  RDGD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RDGD_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  RDGD_STATUS_INVALID_UTF8 = 2,
  /**
   * The configuration failed to parse or validate.
   */
  RDGD_STATUS_CONFIG_ERROR = 3,
  /**
   * The experiment aborted at runtime.
   */
  RDGD_STATUS_RUNTIME_ERROR = 4,
  /**
   * An index argument was out of range.
   */
  RDGD_STATUS_OUT_OF_RANGE = 5,
  /**
   * The requested quantity was not recorded for this run.
   */
  RDGD_STATUS_NOT_RECORDED = 6,
  /**
   * A panic crossed the boundary; state may be inconsistent.
   */
  RDGD_STATUS_PANIC = 7,
} RdgdStatus;

/**
 * Opaque parsed experiment configuration.
 */
typedef struct RdgdConfig RdgdConfig;

/**
 * Opaque finished experiment.
 */
typedef struct RdgdRunResult RdgdRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `len` bytes). Returns the full message length in bytes,
 * excluding the terminator.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (then only the
 * length is returned).
 */
size_t rdgd_last_error(char *buf, size_t len);

/**
 * Parse a configuration from NUL-terminated text into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RdgdStatus rdgd_config_parse(const char *text, struct RdgdConfig **out);

/**
 * # Safety
 * `config` must come from [`rdgd_config_parse`] and not be freed twice.
 */
void rdgd_config_free(struct RdgdConfig *config);

/**
 * Override the root seed.
 *
 * # Safety
 * `config` must be a live handle from [`rdgd_config_parse`].
 */
enum RdgdStatus rdgd_config_set_seed(struct RdgdConfig *config, uint64_t seed);

/**
 * Override the trial count (must be at least 1).
 *
 * # Safety
 * `config` must be a live handle from [`rdgd_config_parse`].
 */
enum RdgdStatus rdgd_config_set_trials(struct RdgdConfig *config, size_t trials);

/**
 * Run the experiment described by `config` and hand back a result handle.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum RdgdStatus rdgd_run(const struct RdgdConfig *config, struct RdgdRunResult **out);

/**
 * # Safety
 * `result` must come from [`rdgd_run`] and not be freed twice.
 */
void rdgd_result_free(struct RdgdRunResult *result);

/**
 * Number of rounds in the run.
 *
 * # Safety
 * `result` must be a live handle from [`rdgd_run`].
 */
size_t rdgd_result_rounds(const struct RdgdRunResult *result);

/**
 * Number of trials in the run.
 *
 * # Safety
 * `result` must be a live handle from [`rdgd_run`].
 */
size_t rdgd_result_trials(const struct RdgdRunResult *result);

/**
 * Mean suboptimality gap at round index `t_index` (0-based).
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum RdgdStatus rdgd_result_gap_mean(const struct RdgdRunResult *result,
                                     size_t t_index,
                                     double *out);

/**
 * Mean test accuracy at round index `t_index` (0-based).
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum RdgdStatus rdgd_result_accuracy_mean(const struct RdgdRunResult *result,
                                          size_t t_index,
                                          double *out);

/**
 * Write trials.csv, aggregate.csv, and result.json into `dir`.
 *
 * # Safety
 * `result` must be a live handle; `dir` a valid NUL-terminated path.
 */
enum RdgdStatus rdgd_result_write(const struct RdgdRunResult *result, const char *dir);

/**
 * Serialize the run metadata and traces to a JSON string. Free with
 * [`rdgd_string_free`].
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum RdgdStatus rdgd_result_json(const struct RdgdRunResult *result, char **out);

/**
 * # Safety
 * `s` must be a string returned by this library and not yet freed.
 */
void rdgd_string_free(char *s);

/**
 * Analytic transition time t0 for the restart algorithm.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RdgdStatus rdgd_transition_time(double m_smooth,
                                     double alpha,
                                     double r_theta,
                                     double r,
                                     uint64_t *out);

/**
 * W_-1 branch of the Lambert W function on [-1/e, 0).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RdgdStatus rdgd_lambert_w_minus1(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDGD_H */
