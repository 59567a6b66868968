#ifndef HARPER_H
#define HARPER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HarperStatus {
  HARPER_STATUS_OK = 0,
  HARPER_STATUS_NULL_POINTER = 1,
  HARPER_STATUS_INVALID_ARGUMENT = 2,
  HARPER_STATUS_NUMERICAL = 3,
  HARPER_STATUS_BUFFER_TOO_SMALL = 4,
  HARPER_STATUS_PANIC = 5,
} HarperStatus;

/**
 * Opaque handle to a circulant-plus-diagonal matrix.
 */
typedef struct HarperMatrix HarperMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the Harper matrix of size `n` with frequency `a`.
 *
 * # Safety
 * `out` must be valid for a pointer write. The handle must be released
 * with [`harper_matrix_free`].
 */
enum HarperStatus harper_matrix_new(uintptr_t n, uintptr_t a, struct HarperMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from [`harper_matrix_new`] not yet freed.
 */
void harper_matrix_free(struct HarperMatrix *m);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writing.
 */
enum HarperStatus harper_matrix_size(const struct HarperMatrix *m, uintptr_t *out);

/**
 * Writes all eigenvalues in descending order. `len` must be at least the
 * matrix size.
 *
 * # Safety
 * `m` must be a live handle and `buf` valid for `len` doubles.
 */
enum HarperStatus harper_matrix_eigenvalues(const struct HarperMatrix *m,
                                            double *buf,
                                            uintptr_t len);

/**
 * Upper bound on the top eigenvalue from time and frequency windows of
 * sizes `k` and `k_prime`.
 *
 * # Safety
 * `m` must be a live handle and `out` valid for writing.
 */
enum HarperStatus harper_matrix_top_bound(const struct HarperMatrix *m,
                                          uintptr_t k,
                                          uintptr_t k_prime,
                                          double *out);

/**
 * Top eigenvalue of the killed walk generator of size `n`, frequency `a`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum HarperStatus harper_lambda_star(uintptr_t n, uintptr_t a, double *out);

/**
 * Complete elliptic integral of the first kind, modulus `k` in [0, 1).
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum HarperStatus harper_elliptic_k(double k, double *out);

/**
 * Limiting bulk density at `x`; infinite at the singular point 0, zero
 * outside [-1, 1].
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum HarperStatus harper_bulk_density(double x, double *out);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`) and returns the full message length
 * without the terminator; 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
uintptr_t harper_last_error(char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARPER_H */
