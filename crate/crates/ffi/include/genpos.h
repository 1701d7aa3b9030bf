#ifndef GENPOS_H
#define GENPOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GenposStatus {
  GENPOS_STATUS_OK = 0,
  GENPOS_STATUS_NULL_POINTER = 1,
  GENPOS_STATUS_INVALID_UTF8 = 2,
  GENPOS_STATUS_DOMAIN = 3,
  GENPOS_STATUS_PRECONDITION = 4,
  GENPOS_STATUS_HYPOTHESIS = 5,
  GENPOS_STATUS_BRACKET = 6,
  GENPOS_STATUS_NON_MONOTONE = 7,
  GENPOS_STATUS_RATIONAL_LOG_RATIO = 8,
  GENPOS_STATUS_DESCRIPTOR = 9,
  GENPOS_STATUS_PANIC = 10,
} GenposStatus;

typedef enum GenposSeparation {
  GENPOS_SEPARATION_DISJOINT = 0,
  GENPOS_SEPARATION_UNDECIDED = 1,
} GenposSeparation;

// Opaque iterated function system.
typedef struct GenposSystem GenposSystem;

// Outcome of a piece-pair separation check.
typedef struct GenposVerdict {
  enum GenposSeparation status;
  // Certified lower bound on the distance between the pieces; 0 when undecided.
  double gap;
  // Largest leaf diameter left when undecided; 0 when disjoint.
  double overlap_diameter;
  size_t depth_used;
  size_t pairs_examined;
} GenposVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *genpos_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated) and returns the
// size needed including the terminator. With a null `buf` or too small `len` nothing is copied.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t genpos_last_error_message(char *buf, size_t len);

// Parses a system descriptor (`{"dim", "maps", "hull"}`) from JSON.
//
// # Safety
// `json` must be null or a NUL-terminated string; `out` must be null or writable.
enum GenposStatus genpos_system_from_json(const char *json, struct GenposSystem **out);

// Builds the exact-overlap family member at `(t, b)`.
//
// # Safety
// `out` must be null or writable.
enum GenposStatus genpos_exact_overlap_new(double t, double b, struct GenposSystem **out);

// Builds the one-point family member at `(p, q, r)`.
//
// # Safety
// `out` must be null or writable.
enum GenposStatus genpos_one_point_new(double p, double q, double r, struct GenposSystem **out);

// Releases a system. Null is ignored.
//
// # Safety
// `system` must be null or a handle from this library not yet freed.
void genpos_system_free(struct GenposSystem *system);

// Number of maps, or 0 for a null handle.
//
// # Safety
// `system` must be null or a live handle.
size_t genpos_system_len(const struct GenposSystem *system);

// Ambient dimension, or 0 for a null handle.
//
// # Safety
// `system` must be null or a live handle.
size_t genpos_system_dim(const struct GenposSystem *system);

// Root of `Σ r_i^s = 1`.
//
// # Safety
// `ratios` must point to `len` doubles; `out` must be writable.
enum GenposStatus genpos_similarity_dimension(const double *ratios, size_t len, double *out);

// Decides whether the pieces of the 1-based words `j` and `k` are disjoint.
//
// # Safety
// `system` must be a live handle; `j`/`k` must point to `j_len`/`k_len` entries; `out` writable.
enum GenposStatus genpos_check_pair_disjoint(const struct GenposSystem *system,
                                             const size_t *j,
                                             size_t j_len,
                                             const size_t *k,
                                             size_t k_len,
                                             double tol,
                                             size_t max_depth,
                                             struct GenposVerdict *out);

// Checks all first-level pieces; `holds` receives 1 if every pair is certified disjoint and
// `min_gap` the smallest certified gap (0 when none).
//
// # Safety
// `system` must be a live handle; `holds` and `min_gap` must be writable.
enum GenposStatus genpos_check_ssc(const struct GenposSystem *system,
                                   double tol,
                                   size_t max_depth,
                                   int32_t *holds,
                                   double *min_gap);

// `C · dist / (1 − r̄)`, rounded up: motion bound for a point at coding distance `dist`.
//
// # Safety
// `out` must be writable.
enum GenposStatus genpos_displacement_bound(double c, double rbar, double dist, double *out);

// Transversality margin of the exact-overlap family for the pair `(1^m, 2^n)`.
double genpos_margin_exact_overlap(size_t n, double b);

// Transversality margin of the one-point family for the pair `(1^m, ·)`.
double genpos_margin_one_point(size_t m, double p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENPOS_H */
