#ifndef BHBLOW_H
#define BHBLOW_H

/* Generated by cbindgen from bhblow-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the library's error taxonomy (and the CLI's exit
 * codes for the overlapping cases).
 */
typedef enum BhStatus {
  /**
   * Success.
   */
  BH_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BH_STATUS_NULL_ARGUMENT = 1,
  /**
   * Invalid configuration or parameters.
   */
  BH_STATUS_CONFIG = 2,
  /**
   * The run stopped before reaching its target.
   */
  BH_STATUS_PARTIAL = 3,
  /**
   * A numeric failure (non-finite values, accuracy loss, resolution).
   */
  BH_STATUS_NUMERIC = 4,
  /**
   * I/O or serialization failure.
   */
  BH_STATUS_IO = 5,
  /**
   * A panic crossed the boundary; the handle state is unspecified.
   */
  BH_STATUS_PANIC = 6,
} BhStatus;

/**
 * Opaque run configuration handle.
 */
typedef struct BhConfig BhConfig;

/**
 * Opaque completed-run handle.
 */
typedef struct BhRun BhRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Pointer to the thread-local message of the last failed call. Valid until
 * the next failing call on the same thread; never null.
 */
const char *bh_last_error(void);

/**
 * Build a named builtin preset (`burgers-oracle`, `bh-main`,
 * `bh-sweep-1e-1`, `bh-sweep-3e-2`, `bh-sweep-1e-2`).
 */
enum BhStatus bh_config_preset(const char *name, struct BhConfig **out);

/**
 * Load a configuration from a JSON file.
 */
enum BhStatus bh_config_from_file(const char *path, struct BhConfig **out);

/**
 * Release a configuration handle. Null is a no-op.
 */
void bh_config_free(struct BhConfig *cfg);

/**
 * Execute the full pipeline for a configuration. On success `*out` owns the
 * completed run.
 */
enum BhStatus bh_run_execute(const struct BhConfig *cfg, struct BhRun **out);

/**
 * Release a run handle. Null is a no-op.
 */
void bh_run_free(struct BhRun *run);

/**
 * Fitted blowup time T*.
 */
enum BhStatus bh_run_t_star(const struct BhRun *run, double *out);

/**
 * Extrapolated blowup location x*.
 */
enum BhStatus bh_run_x_star(const struct BhRun *run, double *out);

/**
 * Final-frame rescaling parameter (third derivative at the slope minimum).
 */
enum BhStatus bh_run_nu_hat(const struct BhRun *run, double *out);

/**
 * Mean cusp exponent of the final snapshot (expected near -2/3).
 */
enum BhStatus bh_run_cusp_exponent(const struct BhRun *run, double *out);

/**
 * Maximum relative drift of the conserved L2 norm over the run.
 */
enum BhStatus bh_run_l2_drift(const struct BhRun *run, double *out);

/**
 * Number of bootstrap ledger items in each status bucket.
 */
enum BhStatus bh_run_bootstrap_counts(const struct BhRun *run,
                                      uintptr_t *pass,
                                      uintptr_t *fail_,
                                      uintptr_t *unchecked);

/**
 * Write every artifact (CSV/JSON/snapshots) of the run into a directory.
 */
enum BhStatus bh_run_write_artifacts(const struct BhRun *run, const char *dir);

/**
 * Closed-form self-similar Burgers profile value at X.
 */
double bh_profile_value(double x);

/**
 * Rescaled profile with third derivative `nu` at the origin; fails for
 * non-positive `nu`.
 */
enum BhStatus bh_profile_rescaled(double nu, double x, double *out);

/**
 * Library version as a static C string.
 */
const char *bh_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BHBLOW_H */
