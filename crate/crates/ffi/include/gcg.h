#ifndef GCG_H
#define GCG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum GcgStatus {
  GCG_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  GCG_STATUS_NULL_POINTER = 1,
  /**
   * Bad parameter, buffer size or string.
   */
  GCG_STATUS_INVALID_ARGUMENT = 2,
  GCG_STATUS_UNKNOWN_PROBLEM = 3,
  /**
   * Linear solve, line search or gap check failed.
   */
  GCG_STATUS_NUMERICAL = 4,
  /**
   * Index past the end of the history.
   */
  GCG_STATUS_OUT_OF_RANGE = 5,
  /**
   * Internal panic caught at the boundary.
   */
  GCG_STATUS_INTERNAL = 6,
} GcgStatus;

/**
 * How a solve terminated.
 */
typedef enum GcgTermination {
  GCG_TERMINATION_CONVERGED = 0,
  GCG_TERMINATION_MAX_ITER_REACHED = 1,
  GCG_TERMINATION_LINE_SEARCH_FAILED = 2,
} GcgTermination;

/**
 * A registered example problem.
 */
typedef struct GcgProblem GcgProblem;

/**
 * The outcome of a solve.
 */
typedef struct GcgResult GcgResult;

/**
 * Solver settings; start from [`gcg_solver_options_default`].
 */
typedef struct GcgSolverOptions {
  double gap_tol;
  size_t max_iter;
  double alpha;
  double gamma;
  uint32_t max_backtracks;
} GcgSolverOptions;

/**
 * One row of the convergence history.
 */
typedef struct GcgRecord {
  size_t k;
  double j_value;
  double gap;
  double step;
  uint32_t backtracks;
} GcgRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library from the same thread.
 */
const char *gcg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gcg_version(void);

/**
 * `α = 0.5`, `γ = 0.99`, gap tolerance `1e-10`, 1000 iterations.
 */
struct GcgSolverOptions gcg_solver_options_default(void);

/**
 * Builds the registered problem `name` with `n` spatial nodes per direction
 * and `nt` time steps (ignored for elliptic problems).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GcgStatus gcg_problem_new(const char *name, size_t n, size_t nt, struct GcgProblem **out);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * `problem` must come from [`gcg_problem_new`] and not be used afterwards.
 */
void gcg_problem_free(struct GcgProblem *problem);

/**
 * Number of control values (grid nodes, times the time steps for
 * parabolic problems). Zero for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t gcg_problem_len(const struct GcgProblem *problem);

/**
 * Solves from `u0` (or from zero when `u0` is null). `u0_len` must equal
 * [`gcg_problem_len`] when `u0` is given; `options` may be null for defaults.
 *
 * # Safety
 * Pointers must be valid; `u0` must hold `u0_len` doubles.
 */
enum GcgStatus gcg_solve(const struct GcgProblem *problem,
                         const struct GcgSolverOptions *options,
                         const double *u0,
                         size_t u0_len,
                         struct GcgResult **out);

/**
 * Releases a result. Null is ignored.
 *
 * # Safety
 * `result` must come from [`gcg_solve`] and not be used afterwards.
 */
void gcg_result_free(struct GcgResult *result);

/**
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GcgStatus gcg_result_termination(const struct GcgResult *result, enum GcgTermination *out);

/**
 * Number of steps taken; the history has one more record. Zero for null.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t gcg_result_iterations(const struct GcgResult *result);

/**
 * History record `k`, `0 ≤ k ≤ iterations`.
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GcgStatus gcg_result_record(const struct GcgResult *result, size_t k, struct GcgRecord *out);

/**
 * Copies the final control into `buf`, which must hold exactly
 * [`gcg_problem_len`] values.
 *
 * # Safety
 * `buf` must point to `len` writable doubles.
 */
enum GcgStatus gcg_result_control(const struct GcgResult *result, double *buf, size_t len);

/**
 * Objective value `f + g` of the final control.
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GcgStatus gcg_result_objective(const struct GcgResult *result, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCG_H */
