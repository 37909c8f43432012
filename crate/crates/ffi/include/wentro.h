/* SPDX-License-Identifier: Apache-2.0 */

#ifndef WENTRO_H
#define WENTRO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WentroStatus {
  WENTRO_STATUS_OK = 0,
  // A required pointer argument was null.
  WENTRO_STATUS_NULL_ARGUMENT = 1,
  WENTRO_STATUS_INVALID_INPUT = 2,
  WENTRO_STATUS_CAP_EXCEEDED = 3,
  WENTRO_STATUS_NUMERICAL = 4,
  // The library panicked; this is a bug.
  WENTRO_STATUS_INTERNAL = 5,
} WentroStatus;

// Opaque factor pair.
typedef struct WentroPair WentroPair;

// Enclosure of the weighted pressure, in nats.
typedef struct WentroBounds {
  double lower;
  double upper;
  double estimate;
  // 1 when `lower` is a proven bound, 0 when it is an estimate.
  int32_t lower_certified;
} WentroBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next call on the same thread.
const char *wentro_last_error(void);

// Builds a pair from a system-file JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum WentroStatus wentro_pair_from_json(const char *json, struct WentroPair **out);

// Builds a pair from an `n x n` row-major 0/1 transition matrix and a code
// table of `n` labels.
//
// # Safety
// `transitions` must hold `n * n` bytes, `code` `n` entries, `out` writable.
enum WentroStatus wentro_pair_new(size_t n,
                                  const uint8_t *transitions,
                                  const size_t *code,
                                  struct WentroPair **out);

// Releases a pair. Null is ignored.
//
// # Safety
// `pair` must come from this library and not be used afterwards.
void wentro_pair_free(struct WentroPair *pair);

// Number of upstairs symbols after pruning; potentials are indexed by them.
//
// # Safety
// `pair` must be a live handle or null (returns 0).
size_t wentro_pair_x_size(const struct WentroPair *pair);

// `log Z_N` for weight `w` and a per-symbol potential (null for zero).
//
// # Safety
// `pair` live, `potential` null or of length `wentro_pair_x_size(pair)`, `out` writable.
enum WentroStatus wentro_partition_sum(const struct WentroPair *pair,
                                       double w,
                                       const double *potential,
                                       size_t n,
                                       double *out);

// Certified enclosure of the weighted pressure from `N = 1 ..= n_max`.
//
// # Safety
// As for [`wentro_partition_sum`].
enum WentroStatus wentro_growth_bounds(const struct WentroPair *pair,
                                       double w,
                                       const double *potential,
                                       size_t n_max,
                                       struct WentroBounds *out);

// Hausdorff dimension of the carpet with digits `(digits[2i], digits[2i+1])`.
//
// # Safety
// `digits` must hold `2 * len` entries and `out` be writable.
enum WentroStatus wentro_carpet_dimension(uint32_t a,
                                          uint32_t b,
                                          const uint32_t *digits,
                                          size_t len,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WENTRO_H */
