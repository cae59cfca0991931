#ifndef VRLAB_H
#define VRLAB_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VrStatus {
  VR_STATUS_OK = 0,
  VR_STATUS_NULL_POINTER = -1,
  VR_STATUS_INVALID_ARGUMENT = -2,
  VR_STATUS_DIMENSION_MISMATCH = -3,
  VR_STATUS_DEGENERATE = -4,
  VR_STATUS_DIMENSION_TOO_LARGE = -5,
  VR_STATUS_NUMERICAL = -6,
  VR_STATUS_IO = -7,
  VR_STATUS_PARSE = -8,
  VR_STATUS_PANIC = -9,
} VrStatus;

/**
 * Opaque centrally symmetric polytope.
 */
typedef struct VrBody VrBody;

/**
 * Result of a volume ratio computation.
 */
typedef struct VrRatio {
  double value;
  double det;
  double feasibility_slack;
  bool converged;
  size_t restarts;
} VrRatio;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *vr_last_error(void);

/**
 * Absolute convex hull of `count` generators of length `dim`, stored row by
 * row in `data`.
 *
 * # Safety
 * `data` must hold `dim * count` values and `out` must be writable.
 */
enum VrStatus vr_body_from_generators(const double *data,
                                      size_t dim,
                                      size_t count,
                                      struct VrBody **out);

/**
 * `B_1^n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VrStatus vr_body_cross_polytope(size_t n, struct VrBody **out);

/**
 * `B_∞^n`, for `n <= 20`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VrStatus vr_body_cube(size_t n, struct VrBody **out);

/**
 * Gaussian random polytope with `big_n` Gaussian generators plus the scaled
 * coordinate vectors. `omega0`, if non-null, receives whether every Gaussian
 * norm lies in the typical window.
 *
 * # Safety
 * `out` must be writable; `omega0` must be null or writable.
 */
enum VrStatus vr_body_gaussian(size_t n,
                               size_t big_n,
                               uint64_t seed,
                               struct VrBody **out,
                               bool *omega0);

/**
 * Reads a single symmetric body from a body file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum VrStatus vr_body_load(const char *path, struct VrBody **out);

/**
 * Releases a body. Null is ignored.
 *
 * # Safety
 * `body` must be null or a live handle from this library.
 */
void vr_body_free(struct VrBody *body);

/**
 * Ambient dimension, or 0 for null.
 *
 * # Safety
 * `body` must be null or a live handle.
 */
size_t vr_body_dim(const struct VrBody *body);

/**
 * Number of generators, or 0 for null.
 *
 * # Safety
 * `body` must be null or a live handle.
 */
size_t vr_body_generator_count(const struct VrBody *body);

/**
 * Exact volume.
 *
 * # Safety
 * `body` must be a live handle and `out` writable.
 */
enum VrStatus vr_body_volume(const struct VrBody *body, double *out);

/**
 * Minkowski gauge `‖x‖_K`.
 *
 * # Safety
 * `x` must hold `len` values and `out` must be writable.
 */
enum VrStatus vr_body_norm(const struct VrBody *body, const double *x, size_t len, double *out);

/**
 * Support function `h_K(y)`.
 *
 * # Safety
 * `y` must hold `len` values and `out` must be writable.
 */
enum VrStatus vr_body_support(const struct VrBody *body, const double *y, size_t len, double *out);

/**
 * Linear image of the body whose Löwner ellipsoid is `√n B_2^n`.
 *
 * # Safety
 * `body` must be a live handle and `out` writable.
 */
enum VrStatus vr_body_loewner_normalize(const struct VrBody *body, struct VrBody **out);

/**
 * Upper estimate of `vr(outer, inner)` from `restarts` seeded starts.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum VrStatus vr_ratio(const struct VrBody *outer,
                       const struct VrBody *inner,
                       size_t restarts,
                       uint64_t seed,
                       struct VrRatio *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VRLAB_H */
