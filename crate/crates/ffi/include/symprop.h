#ifndef SYMPROP_H
#define SYMPROP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_DOMAIN = 2,
  SP_STATUS_BOUNDS = 3,
  SP_STATUS_CONVERGENCE = 4,
  SP_STATUS_NUMERICAL = 5,
  SP_STATUS_UNDEFINED = 6,
  SP_STATUS_PARSE = 7,
  SP_STATUS_INPUT = 8,
  SP_STATUS_IO = 9,
  SP_STATUS_PANIC = 10,
} SpStatus;

/**
 * Opaque fingerprint handle.
 */
typedef struct SpFingerprint SpFingerprint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sp_last_error(void);

/**
 * Builds a fingerprint from per-symbol counts; zero counts are ignored.
 *
 * # Safety
 * `counts` must point to `len` readable values (or be NULL with `len == 0`),
 * and `out` must be writable.
 */
enum SpStatus sp_fingerprint_from_counts(const uint64_t *counts,
                                         size_t len,
                                         struct SpFingerprint **out);

/**
 * Builds a fingerprint from `(j, Φ_j)` pairs given as two parallel arrays.
 *
 * # Safety
 * `js` and `phis` must each point to `len` readable values, and `out` must
 * be writable.
 */
enum SpStatus sp_fingerprint_from_entries(const uint64_t *js,
                                          const uint64_t *phis,
                                          size_t len,
                                          struct SpFingerprint **out);

/**
 * Parses `text` in the named format (`counts`, `fingerprint` or `text`).
 *
 * # Safety
 * `text` and `format` must be NUL-terminated strings, and `out` writable.
 */
enum SpStatus sp_fingerprint_parse(const char *text,
                                   const char *format,
                                   struct SpFingerprint **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `fp` must be NULL or a handle from this library not yet freed.
 */
void sp_fingerprint_free(struct SpFingerprint *fp);

/**
 * Sample size, or 0 for NULL.
 *
 * # Safety
 * `fp` must be NULL or a live handle.
 */
uint64_t sp_fingerprint_n(const struct SpFingerprint *fp);

/**
 * `Φ_j`, or 0 for NULL.
 *
 * # Safety
 * `fp` must be NULL or a live handle.
 */
uint64_t sp_fingerprint_get(const struct SpFingerprint *fp, uint64_t j);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_support_plugin(const struct SpFingerprint *fp, double *out);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_support_chebyshev(const struct SpFingerprint *fp,
                                   uint64_t k,
                                   double c0,
                                   double c1,
                                   double *out);

/**
 * `k == 0` means no upper clamp.
 *
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_support_chebyshev_adaptive(const struct SpFingerprint *fp,
                                            double eps,
                                            double c0,
                                            double c1,
                                            uint64_t k,
                                            double *out);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_support_good_turing(const struct SpFingerprint *fp, double *out);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_support_chao1(const struct SpFingerprint *fp, double *out);

/**
 * `n == 0` uses the fingerprint's own sample size.
 *
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_distinct(const struct SpFingerprint *fp,
                          uint64_t k,
                          uint64_t n,
                          double alpha,
                          double beta,
                          double *out);

/**
 * Polynomial entropy estimate in nats. `k` is ignored when `adaptive`.
 *
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_entropy_polynomial(const struct SpFingerprint *fp,
                                    uint64_t k,
                                    double c0,
                                    double c1,
                                    double c2,
                                    bool adaptive,
                                    bool split,
                                    uint64_t seed,
                                    double *out);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_entropy_empirical(const struct SpFingerprint *fp, double *out);

/**
 * # Safety
 * `fp` must be a live handle and `out` writable.
 */
enum SpStatus sp_entropy_miller_madow(const struct SpFingerprint *fp, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMPROP_H */
