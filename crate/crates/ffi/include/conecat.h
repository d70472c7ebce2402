#ifndef CONECAT_H
#define CONECAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ConecatMiyaokaYau {
  CONECAT_MIYAOKA_YAU_BALL_QUOTIENT_EQUALITY = 0,
  CONECAT_MIYAOKA_YAU_STRICT_INEQUALITY = 1,
  CONECAT_MIYAOKA_YAU_VIOLATION = 2,
} ConecatMiyaokaYau;

typedef enum ConecatStatus {
  CONECAT_STATUS_OK = 0,
  CONECAT_STATUS_NULL_POINTER = 1,
  CONECAT_STATUS_INVALID_INPUT = 2,
  CONECAT_STATUS_GEOMETRY = 3,
  CONECAT_STATUS_GLUING = 4,
  CONECAT_STATUS_NOT_APPLICABLE = 5,
  CONECAT_STATUS_NOT_SPHERICAL = 6,
  CONECAT_STATUS_NOT_ADMISSIBLE = 7,
  CONECAT_STATUS_NOT_NAMED = 8,
  CONECAT_STATUS_IO = 9,
  CONECAT_STATUS_PANIC = 10,
} ConecatStatus;

typedef enum ConecatVerdict {
  CONECAT_VERDICT_CAT_CONFIRMED = 0,
  CONECAT_VERDICT_NOT_CAT = 1,
  CONECAT_VERDICT_UNDETERMINED = 2,
} ConecatVerdict;

/**
 * Opaque line arrangement.
 */
typedef struct ConecatArrangement ConecatArrangement;

/**
 * Opaque cone surface.
 */
typedef struct ConecatSurface ConecatSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *conecat_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void conecat_string_free(char *s);

/**
 * Builds a surface from a JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ConecatStatus conecat_surface_from_json(const char *json, struct ConecatSurface **out);

/**
 * The double of the triangle with the given angles in M²_κ.
 *
 * # Safety
 * `angles` must point to three doubles and `out` be a valid pointer.
 */
enum ConecatStatus conecat_surface_new_double(double kappa_value,
                                              const double *angles,
                                              struct ConecatSurface **out);

/**
 * The cover of the triangle's double induced by the (p, q, r) reflection group.
 *
 * # Safety
 * `angles` and `mult` must point to three values each and `out` be a valid pointer.
 */
enum ConecatStatus conecat_surface_new_cover(double kappa_value,
                                             const double *angles,
                                             const uint32_t *mult,
                                             struct ConecatSurface **out);

/**
 * # Safety
 * `s` must come from a `conecat_surface_*` constructor and not be freed twice.
 */
void conecat_surface_free(struct ConecatSurface *s);

/**
 * Area, Euler characteristic, vertex count and Gauss-Bonnet defect.
 *
 * # Safety
 * `s` must be a live handle; output pointers may be null.
 */
enum ConecatStatus conecat_surface_info(const struct ConecatSurface *s,
                                        double *area,
                                        int64_t *euler_characteristic,
                                        size_t *vertices,
                                        double *gauss_bonnet_defect);

/**
 * Cone angle of vertex `v`.
 *
 * # Safety
 * `s` must be a live handle and `angle` a valid pointer.
 */
enum ConecatStatus conecat_surface_cone_angle(const struct ConecatSurface *s,
                                              size_t v,
                                              double *angle);

/**
 * Global CAT(κ) verdict at the default search density. A non-positive or NaN
 * `length_bound` selects 2π/√κ. The certificate is written as JSON to
 * `certificate_json` when it is not null.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum ConecatStatus conecat_surface_certify(const struct ConecatSurface *s,
                                           double length_bound,
                                           enum ConecatVerdict *out,
                                           char **certificate_json);

/**
 * The combinatorial large-triangle certificate alone.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum ConecatStatus conecat_surface_grompi4(const struct ConecatSurface *s,
                                           enum ConecatVerdict *out);

/**
 * Fiber length of a curvature-4 sphere read as a PK quotient: twice its area.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum ConecatStatus conecat_fiber_length(const struct ConecatSurface *s, double *out);

/**
 * Whether α_min·⌊n/2⌋ ≥ π.
 */
bool conecat_noncat_test(double alpha_min, uint64_t n);

/**
 * One of the named arrangements `A1_6`, `A1_7`, `A3_0_3`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ConecatStatus conecat_arrangement_named(const char *name, struct ConecatArrangement **out);

/**
 * # Safety
 * `a` must come from `conecat_arrangement_named` and not be freed twice.
 */
void conecat_arrangement_free(struct ConecatArrangement *a);

/**
 * Orbifold Chern numbers as exact rationals `"p/q"`, and the Miyaoka-Yau verdict.
 * `b` holds one multiplicity per line, or a single value for all lines.
 *
 * # Safety
 * `a` must be a live handle, `b` must hold `len` values; string outputs may be null.
 */
enum ConecatStatus conecat_chern_numbers(const struct ConecatArrangement *a,
                                         const uint32_t *b,
                                         size_t len,
                                         char **c1_sq,
                                         char **three_e,
                                         enum ConecatMiyaokaYau *out);

/**
 * CAT(0) certificate of an orbifold structure on a named arrangement.
 *
 * # Safety
 * `a` must be a live handle, `b` must hold `len` values and `out` be valid.
 */
enum ConecatStatus conecat_arrangement_certify(const struct ConecatArrangement *a,
                                               const uint32_t *b,
                                               size_t len,
                                               enum ConecatVerdict *out,
                                               char **certificate_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONECAT_H */
