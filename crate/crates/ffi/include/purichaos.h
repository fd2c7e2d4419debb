#ifndef PURICHAOS_H
#define PURICHAOS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PurichaosStatus {
  PURICHAOS_STATUS_OK = 0,
  PURICHAOS_STATUS_INVALID_ARGUMENT = 1,
  PURICHAOS_STATUS_NULL_POINTER = 2,
  PURICHAOS_STATUS_COMPUTATION_FAILED = 3,
  PURICHAOS_STATUS_IO_ERROR = 4,
  PURICHAOS_STATUS_PANIC = 5,
  PURICHAOS_STATUS_BUFFER_TOO_SMALL = 6,
} PurichaosStatus;

typedef enum PurichaosParity {
  PURICHAOS_PARITY_EVEN_ZERO = 0,
  PURICHAOS_PARITY_ODD_ZERO = 1,
  PURICHAOS_PARITY_UNRESOLVED = 2,
} PurichaosParity;

typedef enum PurichaosLabel {
  PURICHAOS_LABEL_BELL = 0,
  PURICHAOS_LABEL_SEPARABLE_CYCLE = 1,
  PURICHAOS_LABEL_MIXED_CYCLE = 2,
  PURICHAOS_LABEL_UNRESOLVED = 3,
} PurichaosLabel;

typedef struct PurichaosBasin PurichaosBasin;

typedef struct PurichaosClassifier PurichaosClassifier;

typedef struct PurichaosTrajectory PurichaosTrajectory;

typedef struct PurichaosConstants {
  double a;
  double zeta_a;
  double zeta_b;
  double zeta_c;
} PurichaosConstants;

/**
 * A point of the Riemann sphere; `re`/`im` are ignored when `is_infinite` is nonzero.
 */
typedef struct PurichaosPoint {
  double re;
  double im;
  int32_t is_infinite;
} PurichaosPoint;

typedef struct PurichaosGridSpec {
  double re_min;
  double re_max;
  double im_min;
  double im_max;
  size_t width;
  size_t height;
  double lambda;
  /**
   * 0 selects the default for `lambda`.
   */
  size_t max_iters;
  double tol;
  int32_t supersample;
} PurichaosGridSpec;

typedef struct PurichaosLabelCounts {
  size_t cells;
  size_t bell;
  size_t separable;
  size_t mixed;
  size_t unresolved;
} PurichaosLabelCounts;

/**
 * One trajectory step; `fano` holds the 16 Pauli-product coordinates of the state.
 */
typedef struct PurichaosStepRecord {
  size_t step;
  double fano[16];
  double entropy;
  double purity;
  double success_probability;
  double cumulative_yield;
} PurichaosStepRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after a success).
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *purichaos_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *purichaos_version(void);

/**
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_constants(struct PurichaosConstants *out);

/**
 * `f(ζ) = (1 - ζ²)/(1 + ζ²)` on the Riemann sphere.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_eval_f(struct PurichaosPoint z, struct PurichaosPoint *out);

/**
 * `g = f∘f` on the Riemann sphere.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_eval_g(struct PurichaosPoint z, struct PurichaosPoint *out);

/**
 * Parity of the first iterate of `f` that enters `|ζ| < tol`.
 *
 * # Safety
 * `parity` and `steps` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_iterate_reduced(struct PurichaosPoint z,
                                               size_t max_iters,
                                               double tol,
                                               enum PurichaosParity *parity,
                                               size_t *steps);

/**
 * Prepares attractor targets for `lambda`. For `lambda < 1` this runs the
 * mixed-cycle search once, so reuse the handle for many points.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_classifier_new(double lambda,
                                              size_t max_iters,
                                              double tol,
                                              struct PurichaosClassifier **out);

/**
 * # Safety
 * `classifier` must come from [`purichaos_classifier_new`]; outputs NULL or writable.
 */
enum PurichaosStatus purichaos_classifier_classify(const struct PurichaosClassifier *classifier,
                                                   struct PurichaosPoint z,
                                                   enum PurichaosLabel *label,
                                                   size_t *steps);

/**
 * # Safety
 * `classifier` must be NULL or a handle not yet freed.
 */
void purichaos_classifier_free(struct PurichaosClassifier *classifier);

/**
 * Convenience wrapper building a throw-away classifier.
 *
 * # Safety
 * `label` and `steps` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_classify_point(struct PurichaosPoint z,
                                              double lambda,
                                              size_t max_iters,
                                              double tol,
                                              enum PurichaosLabel *label,
                                              size_t *steps);

/**
 * Computes a basin grid with `threads` workers (0 = default pool).
 *
 * # Safety
 * `spec` must be NULL or point to a valid spec; `out` NULL or writable.
 */
enum PurichaosStatus purichaos_basin_compute(const struct PurichaosGridSpec *spec,
                                             size_t threads,
                                             struct PurichaosBasin **out);

/**
 * Width of the grid, 0 for NULL.
 *
 * # Safety
 * `basin` must be NULL or a live handle.
 */
size_t purichaos_basin_width(const struct PurichaosBasin *basin);

/**
 * Height of the grid, 0 for NULL.
 *
 * # Safety
 * `basin` must be NULL or a live handle.
 */
size_t purichaos_basin_height(const struct PurichaosBasin *basin);

/**
 * Copies `width*height` label codes (row-major from top-left) into `buf`.
 *
 * # Safety
 * `buf` must be NULL or valid for `len` bytes.
 */
enum PurichaosStatus purichaos_basin_labels(const struct PurichaosBasin *basin,
                                            uint8_t *buf,
                                            size_t len);

/**
 * Copies the per-cell first-detection steps into `buf`.
 *
 * # Safety
 * `buf` must be NULL or valid for `len` elements.
 */
enum PurichaosStatus purichaos_basin_steps(const struct PurichaosBasin *basin,
                                           uint32_t *buf,
                                           size_t len);

/**
 * # Safety
 * `basin` NULL or live; `out` NULL or writable.
 */
enum PurichaosStatus purichaos_basin_counts(const struct PurichaosBasin *basin,
                                            struct PurichaosLabelCounts *out);

/**
 * Box-counting dimension of the label boundary.
 *
 * # Safety
 * `basin` NULL or live; outputs NULL or writable.
 */
enum PurichaosStatus purichaos_basin_boundary_dimension(const struct PurichaosBasin *basin,
                                                        double *dimension,
                                                        double *r2);

/**
 * # Safety
 * `basin` NULL or live; `path` NULL or a NUL-terminated UTF-8 string.
 */
enum PurichaosStatus purichaos_basin_write_ppm(const struct PurichaosBasin *basin,
                                               const char *path);

/**
 * # Safety
 * `basin` NULL or live; `path` NULL or a NUL-terminated UTF-8 string.
 */
enum PurichaosStatus purichaos_basin_write_csv(const struct PurichaosBasin *basin,
                                               const char *path);

/**
 * # Safety
 * `basin` must be NULL or a handle not yet freed.
 */
void purichaos_basin_free(struct PurichaosBasin *basin);

/**
 * Runs `steps` protocol rounds from `ρ(ζ, λ)`; record `k` is the state after round `k+1`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_trajectory_run(struct PurichaosPoint z,
                                              double lambda,
                                              size_t steps,
                                              struct PurichaosTrajectory **out);

/**
 * Number of records, 0 for NULL.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t purichaos_trajectory_len(const struct PurichaosTrajectory *traj);

/**
 * # Safety
 * `traj` NULL or live; `out` NULL or writable.
 */
enum PurichaosStatus purichaos_trajectory_record(const struct PurichaosTrajectory *traj,
                                                 size_t index,
                                                 struct PurichaosStepRecord *out);

/**
 * # Safety
 * `traj` must be NULL or a handle not yet freed.
 */
void purichaos_trajectory_free(struct PurichaosTrajectory *traj);

/**
 * Compares the selection formula with the two-pair circuit on seeded random states.
 * `passed` is set to 1 when both deviations are within tolerance.
 *
 * # Safety
 * Outputs must be NULL or valid for writes.
 */
enum PurichaosStatus purichaos_oracle_check(size_t samples,
                                            uint64_t seed,
                                            double *max_deviation,
                                            int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PURICHAOS_H */
