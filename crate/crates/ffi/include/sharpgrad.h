#ifndef SHARPGRAD_H
#define SHARPGRAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  SG_STATUS_NULL_POINTER = 1,
  /**
   * An argument was outside the domain of the routine.
   */
  SG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A series hit its term limit.
   */
  SG_STATUS_CONVERGENCE = 3,
  /**
   * A quadrature hit its refinement limit.
   */
  SG_STATUS_ACCURACY = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  SG_STATUS_INTERNAL = 5,
} SgStatus;

/**
 * Evaluation route of a result; `Auto` is only meaningful as an input.
 */
typedef enum SgPath {
  SG_PATH_AUTO = 0,
  SG_PATH_SPHERE_QUADRATURE = 1,
  SG_PATH_DISC_REDUCTION = 2,
  SG_PATH_CLOSED_FORM = 3,
  SG_PATH_MONTE_CARLO = 4,
} SgPath;

typedef enum SgRegime {
  SG_REGIME_BELOW = 0,
  SG_REGIME_AT_N = 1,
  SG_REGIME_ABOVE = 2,
  SG_REGIME_INFINITY = 3,
} SgRegime;

typedef enum SgDirection {
  SG_DIRECTION_RADIAL = 0,
  SG_DIRECTION_TANGENTIAL = 1,
  SG_DIRECTION_OBLIQUE = 2,
  SG_DIRECTION_ANY = 3,
} SgDirection;

/**
 * Opaque evaluation context.
 */
typedef struct SgContext SgContext;

/**
 * A sharp constant together with its `K` factor and provenance.
 */
typedef struct SgConstant {
  double value;
  double k;
  /**
   * Reduced angle in `[0, π/2]` that was evaluated.
   */
  double gamma;
  double err_est;
  enum SgPath path;
  enum SgRegime regime;
  enum SgDirection direction;
} SgConstant;

/**
 * Summary of one verification suite.
 */
typedef struct SgSuiteResult {
  bool passed;
  size_t cases;
  size_t failures;
  double worst;
  double tolerance;
} SgSuiteResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a context with default tolerances. Never returns null.
 */
struct SgContext *sg_context_new(void);

/**
 * Releases a context. Null is ignored.
 *
 * # Safety
 * `ctx` must be null or come from [`sg_context_new`], and must not be used
 * afterwards.
 */
void sg_context_free(struct SgContext *ctx);

/**
 * Message of the last failed call on `ctx`; empty after a success. The
 * pointer stays valid until the next call on `ctx`.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
const char *sg_context_last_error(const struct SgContext *ctx);

/**
 * Sets the adaptive Gauss–Legendre controls.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
enum SgStatus sg_context_set_quadrature(struct SgContext *ctx,
                                        double rel_tol,
                                        double abs_tol,
                                        size_t base_order,
                                        size_t max_refinements);

/**
 * Sets the hypergeometric series controls.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
enum SgStatus sg_context_set_series(struct SgContext *ctx, double rel_tol, size_t max_terms);

/**
 * Sets the Monte-Carlo fallback sample count and seed.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
enum SgStatus sg_context_set_monte_carlo(struct SgContext *ctx, size_t samples, uint64_t seed);

/**
 * Forces an evaluation path for constants; `SG_PATH_AUTO` restores the
 * automatic choice.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
enum SgStatus sg_context_set_path(struct SgContext *ctx, enum SgPath path);

/**
 * The hyperbolic Poisson kernel `P_h(x, ζ)`.
 *
 * # Safety
 * `x` and `zeta` must point to `n` doubles; `out` must be writable.
 */
enum SgStatus sg_poisson_kernel(struct SgContext *ctx,
                                size_t n,
                                const double *x,
                                const double *zeta,
                                double *out);

/**
 * `∇ₓ P_h(x, ζ)`, written to `out[0..n]`.
 *
 * # Safety
 * `x` and `zeta` must point to `n` doubles; `out` to `n` writable doubles.
 */
enum SgStatus sg_kernel_gradient(struct SgContext *ctx,
                                 size_t n,
                                 const double *x,
                                 const double *zeta,
                                 double *out);

/**
 * The Möbius involution `φ_x(y)`, written to `out[0..n]`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles; `out` to `n` writable doubles.
 */
enum SgStatus sg_mobius(struct SgContext *ctx,
                        size_t n,
                        const double *x,
                        const double *y,
                        double *out);

/**
 * `sup_ℓ C_p(x; ℓ)` at `x = x_norm e₁` in dimension `n`.
 *
 * # Safety
 * `ctx` must be null or a live context; `out` must be writable.
 */
enum SgStatus sg_constant_optimal(struct SgContext *ctx,
                                  size_t n,
                                  double p,
                                  double x_norm,
                                  struct SgConstant *out);

/**
 * `C_p(x; ℓ)` where `ℓ` makes angle `gamma` with `x = x_norm e₁`.
 *
 * # Safety
 * `ctx` must be null or a live context; `out` must be writable.
 */
enum SgStatus sg_constant_at_angle(struct SgContext *ctx,
                                   size_t n,
                                   double p,
                                   double x_norm,
                                   double gamma,
                                   struct SgConstant *out);

/**
 * Runs one named verification suite over `dims[0..n_dims]`, using the
 * context's quadrature and series controls. A suite that runs but fails
 * still returns `SG_STATUS_OK` with `passed = false`.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `dims` must point to `n_dims`
 * values and `out` must be writable.
 */
enum SgStatus sg_run_suite(struct SgContext *ctx,
                           const char *name,
                           const size_t *dims,
                           size_t n_dims,
                           uint64_t seed,
                           struct SgSuiteResult *out);

/**
 * Static name of a status code.
 */
const char *sg_status_name(enum SgStatus status);

/**
 * Library version as a static string.
 */
const char *sg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHARPGRAD_H */
