#ifndef SCORE_FFI_H
#define SCORE_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScoreSpacing {
  SCORE_SPACING_LINEAR = 0,
  SCORE_SPACING_LOG = 1,
} ScoreSpacing;

/*
 Result codes.
 */
typedef enum ScoreStatus {
  SCORE_STATUS_OK = 0,
  SCORE_STATUS_NULL_POINTER = 1,
  SCORE_STATUS_INVALID_INPUT = 2,
  SCORE_STATUS_INVALID_PARAMETER = 3,
  SCORE_STATUS_INVALID_CONFIGURATION = 4,
  SCORE_STATUS_IO = 5,
  SCORE_STATUS_OUT_OF_RANGE = 6,
  SCORE_STATUS_PANIC = 7,
} ScoreStatus;

/*
 Opaque result of [`score_select_threshold`].
 */
typedef struct ScoreSelection ScoreSelection;

/*
 Exact DOF of hard thresholding, split into its two terms.
 */
typedef struct ScoreDofDecomposition {
  double count_term;
  double jump_term;
  double total;
} ScoreDofDecomposition;

/*
 One row of a selection's risk curve.
 */
typedef struct ScoreCurveRow {
  double lambda;
  double score;
  double edof;
} ScoreCurveRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `buf_len - 1` bytes). Returns the full message length in
 bytes, excluding the terminator; `buf` may be null to query the length.

 # Safety
 `buf` must be null or valid for `buf_len` bytes.
 */
size_t score_last_error_message(char *buf, size_t buf_len);

/*
 Hard thresholding of `y` into `out` (both of length `len`).

 # Safety
 `y` must be readable and `out` writable for `len` doubles.
 */
enum ScoreStatus score_hard_threshold(const double *y, size_t len, double lambda, double *out);

/*
 Soft thresholding of `y` into `out` (both of length `len`).

 # Safety
 `y` must be readable and `out` writable for `len` doubles.
 */
enum ScoreStatus score_soft_threshold(const double *y, size_t len, double lambda, double *out);

/*
 Smoothed DOF estimate of hard thresholding.

 # Safety
 `y` must be readable for `len` doubles; `out` must be writable.
 */
enum ScoreStatus score_edof_ht(const double *y,
                               size_t len,
                               double lambda,
                               double sigma,
                               double h,
                               double *out);

/*
 SCORE of hard thresholding at `lambda`.

 # Safety
 `y` must be readable for `len` doubles; `out` must be writable.
 */
enum ScoreStatus score_score(const double *y,
                             size_t len,
                             double lambda,
                             double sigma,
                             double h,
                             double *out);

/*
 `‖y − x‖² − Pσ² + 2σ²·dof`.

 # Safety
 `y` and `x` must be readable for `len` doubles; `out` must be writable.
 */
enum ScoreStatus score_risk_criterion(const double *y,
                                      const double *x,
                                      size_t len,
                                      double dof,
                                      double sigma,
                                      double *out);

/*
 Exact DOF of hard thresholding for a known clean signal `x0`.

 # Safety
 `x0` must be readable for `len` doubles; `out` must be writable.
 */
enum ScoreStatus score_dof_ht_closed_form(const double *x0,
                                          size_t len,
                                          double lambda,
                                          double sigma,
                                          struct ScoreDofDecomposition *out);

/*
 Bandwidth `c·σ / P^alpha`.

 # Safety
 `out` must be writable.
 */
enum ScoreStatus score_bandwidth(size_t p, double sigma, double c, double alpha, double *out);

/*
 Grid search for the SCORE-minimizing threshold over `n_points` values
 in `[lambda_min, lambda_max]`, with bandwidth `c·σ / P^alpha`. On
 success `*out` receives a handle owned by the caller.

 # Safety
 `y` must be readable for `len` doubles; `out` must be writable.
 */
enum ScoreStatus score_select_threshold(const double *y,
                                        size_t len,
                                        double sigma,
                                        double lambda_min,
                                        double lambda_max,
                                        size_t n_points,
                                        enum ScoreSpacing spacing,
                                        double c,
                                        double alpha,
                                        struct ScoreSelection **out);

/*
 Releases a selection handle. Null is a no-op.

 # Safety
 `handle` must be null or come from [`score_select_threshold`] and not
 have been freed.
 */
void score_selection_free(struct ScoreSelection *handle);

/*
 Selected threshold; NaN for a null handle.

 # Safety
 `handle` must be null or a live selection handle.
 */
double score_selection_lambda_star(const struct ScoreSelection *handle);

/*
 Minimum SCORE over the grid; NaN for a null handle.

 # Safety
 `handle` must be null or a live selection handle.
 */
double score_selection_score_star(const struct ScoreSelection *handle);

/*
 Length of the denoised vector; 0 for a null handle.

 # Safety
 `handle` must be null or a live selection handle.
 */
size_t score_selection_len(const struct ScoreSelection *handle);

/*
 Number of curve rows; 0 for a null handle.

 # Safety
 `handle` must be null or a live selection handle.
 */
size_t score_selection_curve_len(const struct ScoreSelection *handle);

/*
 Copies the denoised vector into `out`, which must hold `len` doubles;
 `len` must equal [`score_selection_len`].

 # Safety
 `handle` must be live; `out` must be writable for `len` doubles.
 */
enum ScoreStatus score_selection_copy_x_star(const struct ScoreSelection *handle,
                                             double *out,
                                             size_t len);

/*
 Reads curve row `index`.

 # Safety
 `handle` must be live; `out` must be writable.
 */
enum ScoreStatus score_selection_curve_row(const struct ScoreSelection *handle,
                                           size_t index,
                                           struct ScoreCurveRow *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCORE_FFI_H */
