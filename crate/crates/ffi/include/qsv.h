#ifndef QSV_H
#define QSV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsvPrecision {
  QSV_PRECISION_DOUBLE = 0,
  QSV_PRECISION_EXTENDED = 1,
} QsvPrecision;

typedef enum QsvStatus {
  QSV_STATUS_OK = 0,
  QSV_STATUS_NULL_POINTER = 1,
  QSV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation was well posed but hit a pole or degenerate input.
   */
  QSV_STATUS_EVALUATION = 3,
  QSV_STATUS_NONCONVERGENT = 4,
  QSV_STATUS_CONFIG = 5,
  QSV_STATUS_IO = 6,
  QSV_STATUS_PANIC = 7,
} QsvStatus;

/**
 * Opaque evaluation context for a fixed nome `q`.
 */
typedef struct QsvContext QsvContext;

typedef struct QsvComplex {
  double re;
  double im;
} QsvComplex;

/**
 * Outcome of a single identity check.
 */
typedef struct QsvCheck {
  bool passed;
  struct QsvComplex lhs;
  struct QsvComplex rhs;
  double abs_residual;
  double rel_residual;
  double tolerance;
} QsvCheck;

typedef struct QsvSuiteSummary {
  size_t reports;
  size_t pass;
  size_t fail;
  size_t rejected;
  size_t nonconvergent;
  double max_rel_residual;
  int32_t exit_code;
} QsvSuiteSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *qsv_last_error(void);

/**
 * Creates a context for `q` with `0 < |q| < 1`. `precision` takes a
 * [`QsvPrecision`] value.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum QsvStatus qsv_context_new(struct QsvComplex q, uint32_t precision, struct QsvContext **out);

/**
 * Overrides the relative tolerance used by the `qsv_check_*` calls.
 *
 * # Safety
 * `ctx` must be a live handle from [`qsv_context_new`].
 */
enum QsvStatus qsv_context_set_tolerance(struct QsvContext *ctx, double tol);

/**
 * # Safety
 * `ctx` must be null or a handle from [`qsv_context_new`] not yet freed.
 */
void qsv_context_free(struct QsvContext *ctx);

/**
 * `(a; q)_k` for any integer `k`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
enum QsvStatus qsv_qpoch(const struct QsvContext *ctx,
                         struct QsvComplex a,
                         int64_t k,
                         struct QsvComplex *out);

/**
 * `(a; q)_∞`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
enum QsvStatus qsv_qpoch_inf(const struct QsvContext *ctx,
                             struct QsvComplex a,
                             struct QsvComplex *out);

/**
 * `θ(x; q) = (x; q)_∞ (q/x; q)_∞`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
enum QsvStatus qsv_theta(const struct QsvContext *ctx, struct QsvComplex x, struct QsvComplex *out);

/**
 * Checks `θ(x q^k) = (−1)^k q^{−k(k−1)/2} x^{−k} θ(x)`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
enum QsvStatus qsv_check_theta_quasiperiodicity(const struct QsvContext *ctx,
                                                struct QsvComplex x,
                                                int64_t k,
                                                struct QsvCheck *out);

/**
 * Runs a suite described by a TOML document (same keys as `qsv --config`).
 *
 * When `jsonl` is non-null it receives the report stream, to be released
 * with [`qsv_string_free`].
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `summary` must be writable;
 * `jsonl` must be null or writable.
 */
enum QsvStatus qsv_run_suite(const char *config_toml,
                             struct QsvSuiteSummary *summary,
                             char **jsonl);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void qsv_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSV_H */
