#ifndef NUMPOST_H
#define NUMPOST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum NumpostStatus {
  NUMPOST_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  NUMPOST_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  NUMPOST_STATUS_INVALID_UTF8 = 2,
  NUMPOST_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The configuration could not be parsed or is inconsistent.
   */
  NUMPOST_STATUS_CONFIG = 4,
  /**
   * A solver or quadrature failed.
   */
  NUMPOST_STATUS_NUMERICAL = 5,
  NUMPOST_STATUS_IO = 6,
  /**
   * The library panicked; this is a bug.
   */
  NUMPOST_STATUS_PANIC = 7,
} NumpostStatus;

/**
 * Which forward solver a posterior handle uses.
 */
typedef enum NumpostVariant {
  /**
   * Fixed fine step or grid.
   */
  NUMPOST_VARIANT_FINE = 0,
  /**
   * Error-controlled step or grid at the bound's tolerance.
   */
  NUMPOST_VARIANT_ADAPTIVE = 1,
} NumpostVariant;

/**
 * Opaque numerical posterior built from an experiment config.
 */
typedef struct NumpostPosterior NumpostPosterior;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *numpost_version(void);

/**
 * Copies the last error message of this thread into `buf` (nul-terminated,
 * truncated to `len`). Returns the full message length without the nul, or
 * 0 if there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t numpost_last_error(char *buf, size_t len);

/**
 * Clears the last error of this thread.
 */
void numpost_clear_error(void);

/**
 * Complementary error function.
 */
double numpost_erfc(double x);

/**
 * Closed-form logistic growth `X(t)` with rate `r`, capacity `k`, start `x0`.
 */
double numpost_logistic_exact(double t, double r, double k, double x0);

/**
 * Viscous Burgers travelling-shock solution `u(z, t)`.
 *
 * # Safety
 * `out` must be null or point to a writable `double`.
 */
enum NumpostStatus numpost_burgers_exact(double z,
                                         double t,
                                         double u_left,
                                         double u_right,
                                         double z0,
                                         double epsilon,
                                         double *out);

/**
 * Largest uniform forward-map error `K0` keeping the EABF at `target_eabf`
 * for `n` observations, noise `sigma_star` and correlation factor `factor`
 * (1 for independent noise). A nonzero `two_decimals` rounds `k` down to two
 * decimals.
 *
 * # Safety
 * `out` must be null or point to a writable `double`.
 */
enum NumpostStatus numpost_admissible_k0(size_t n,
                                         double sigma_star,
                                         double factor,
                                         double target_eabf,
                                         int32_t two_decimals,
                                         double *out);

/**
 * Upper bound on the EABF implied by a uniform forward-map error `k0`.
 */
double numpost_eabf_upper_bound(size_t n, double sigma_star, double k0, double factor);

/**
 * Builds a posterior from a JSON experiment config. Synthetic data are drawn
 * from the config's seed, exactly as the command-line tool does.
 *
 * # Safety
 * `config_json` must be null or a nul-terminated string; `out` must be null
 * or point to a writable pointer. On success `*out` owns a new handle.
 */
enum NumpostStatus numpost_posterior_new(const char *config_json,
                                         enum NumpostVariant variant,
                                         struct NumpostPosterior **out);

/**
 * Frees a handle from [`numpost_posterior_new`]. Null is ignored.
 *
 * # Safety
 * `handle` must be null or a live handle not used afterwards.
 */
void numpost_posterior_free(struct NumpostPosterior *handle);

/**
 * Number of parameters, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
size_t numpost_posterior_dim(const struct NumpostPosterior *handle);

/**
 * Name of parameter `index` as a nul-terminated string owned by the handle,
 * or null if out of range.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
const char *numpost_posterior_param_name(const struct NumpostPosterior *handle, size_t index);

/**
 * Solver tolerance handed to the adaptive forward map, and the admissible
 * `K0` from the bound (they differ only when the config overrides the
 * tolerance). Either out-pointer may be null.
 *
 * # Safety
 * `handle` must be a live handle; non-null out-pointers must be writable.
 */
enum NumpostStatus numpost_posterior_tolerance(const struct NumpostPosterior *handle,
                                               double *tolerance,
                                               double *k0_admissible);

/**
 * Unnormalized log-posterior at `theta[0..len]`; `-inf` outside the prior.
 * If `tolerance_met` is not null it receives 1 when the forward solve met
 * its tolerance (always 1 for the fine variant) and 0 otherwise.
 *
 * # Safety
 * `handle` must be a live handle, `theta` valid for `len` reads and `out`
 * writable; `tolerance_met` may be null.
 */
enum NumpostStatus numpost_posterior_log_density(struct NumpostPosterior *handle,
                                                 const double *theta,
                                                 size_t len,
                                                 double *out,
                                                 int32_t *tolerance_met);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NUMPOST_H */
