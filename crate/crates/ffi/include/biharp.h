#ifndef BIHARP_H
#define BIHARP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum BiharpStatus {
  BIHARP_STATUS_OK = 0,
  BIHARP_STATUS_NULL_POINTER = 1,
  BIHARP_STATUS_INVALID_UTF8 = 2,
  BIHARP_STATUS_RESOLUTION = 3,
  BIHARP_STATUS_DOMAIN = 4,
  BIHARP_STATUS_DEGENERATE = 5,
  BIHARP_STATUS_PRECONDITION = 6,
  BIHARP_STATUS_CONFIG = 7,
  BIHARP_STATUS_VIOLATION = 8,
  BIHARP_STATUS_IO = 9,
  BIHARP_STATUS_JSON = 10,
  BIHARP_STATUS_OUT_OF_RANGE = 11,
  BIHARP_STATUS_PANIC = 12,
} BiharpStatus;

// An atomic decomposition.
typedef struct BiharpDecomposition BiharpDecomposition;

// A finite Haar expansion.
typedef struct BiharpExpansion BiharpExpansion;

// A set of Pietsch weights.
typedef struct BiharpWeights BiharpWeights;

// Message of the last failing call on this thread, or null. Owned by the
// library; valid until the next failing call.
const char *biharp_last_error(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must come from this library or be null.
void biharp_string_free(char *s);

// Parses the expansion JSON schema `{"maxLevel", "coeffs": [...]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum BiharpStatus biharp_expansion_from_json(const char *json, struct BiharpExpansion **out);

// Builds an expansion from parallel arrays of side levels, indices and
// values. Repeated rectangles are summed.
//
// # Safety
// Each array must hold `len` elements; `out` must be writable.
enum BiharpStatus biharp_expansion_from_arrays(uint32_t max_level,
                                               size_t len,
                                               const uint32_t *i_level,
                                               const uint64_t *i_index,
                                               const uint32_t *j_level,
                                               const uint64_t *j_index,
                                               const double *values,
                                               struct BiharpExpansion **out);

// # Safety
// `h` must come from this library or be null.
void biharp_expansion_free(struct BiharpExpansion *h);

// Number of nonzero coefficients.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_expansion_support_len(const struct BiharpExpansion *h, size_t *out);

// `‖f‖_{H^p}` on the grid `2^grid x 2^grid`; `grid = 0` selects `L + 1`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_hp_norm(const struct BiharpExpansion *h,
                                 double p,
                                 uint32_t grid,
                                 double *out);

// Atomic decomposition at exponent `p`; `grid = 0` selects `L + 1`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_decompose(const struct BiharpExpansion *h,
                                   double p,
                                   uint32_t grid,
                                   struct BiharpDecomposition **out);

// # Safety
// `d` must come from this library or be null.
void biharp_decomposition_free(struct BiharpDecomposition *d);

// `B = Σ_n |R_n^*|^(1-p/2) ‖f_n‖_2^p`.
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_decomposition_b(const struct BiharpDecomposition *d, double *out);

// # Safety
// `d` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_decomposition_norm(const struct BiharpDecomposition *d, double *out);

// Number of nonempty levels `R_n`.
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_decomposition_level_count(const struct BiharpDecomposition *d,
                                                   size_t *out);

// JSON export; free the result with [`biharp_string_free`].
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_decomposition_to_json(const struct BiharpDecomposition *d, char **out);

// B-normalized Pietsch weights of `h` for the decomposition `d` of `h`.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum BiharpStatus biharp_weights_new(const struct BiharpExpansion *h,
                                     const struct BiharpDecomposition *d,
                                     struct BiharpWeights **out);

// # Safety
// `w` must come from this library or be null.
void biharp_weights_free(struct BiharpWeights *w);

// # Safety
// `w` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_weights_len(const struct BiharpWeights *w, size_t *out);

// Entry `index` in rectangle order: side levels, indices and `ω`.
//
// # Safety
// `w` must be a live handle; all outputs must be writable.
enum BiharpStatus biharp_weights_get(const struct BiharpWeights *w,
                                     size_t index,
                                     uint32_t *i_level,
                                     uint64_t *i_index,
                                     uint32_t *j_level,
                                     uint64_t *j_index,
                                     double *omega);

// `B^(1/p)`.
//
// # Safety
// `w` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_weights_domination_constant(const struct BiharpWeights *w, double *out);

// JSON export; free the result with [`biharp_string_free`].
//
// # Safety
// `w` must be a live handle; `out` must be writable.
enum BiharpStatus biharp_weights_to_json(const struct BiharpWeights *w, char **out);

// `‖M_f φ‖_{H^p} / (B^(1/p) (Σ φ^2 ω)^(1/2))` for `φ` given on the support
// of `f` in rectangle order (`len` must equal the support size). Returns
// `Violation` when the ratio exceeds 1 beyond round-off.
//
// # Safety
// Handles must be live; `phi` must hold `len` values; `out` must be writable.
enum BiharpStatus biharp_domination_ratio(const struct BiharpExpansion *h,
                                          const struct BiharpWeights *w,
                                          const double *phi,
                                          size_t len,
                                          double *out);

#endif  /* BIHARP_H */
