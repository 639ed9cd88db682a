#ifndef RIFS_H
#define RIFS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum RifsStatus {
  RIFS_STATUS_OK = 0,
  RIFS_STATUS_NULL_POINTER = 1,
  RIFS_STATUS_INVALID_UTF8 = 2,
  RIFS_STATUS_MALFORMED_JSON = 3,
  RIFS_STATUS_SCHEMA_VIOLATION = 4,
  RIFS_STATUS_DOMAIN_ERROR = 5,
  RIFS_STATUS_ALPHA_MISMATCH = 6,
  RIFS_STATUS_DP_VIOLATION = 7,
  RIFS_STATUS_DIVERGENT_INTEGRAL = 8,
  RIFS_STATUS_QUADRATURE_CAP = 9,
  RIFS_STATUS_NON_CONVERGENCE = 10,
  RIFS_STATUS_HYPOTHESIS_FAILED = 11,
  RIFS_STATUS_IO_ERROR = 12,
  RIFS_STATUS_PANIC = 13,
} RifsStatus;

// Opaque normed space.
typedef struct RifsSpace RifsSpace;

// Opaque step function.
typedef struct RifsStep RifsStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next call on the same thread.
const char *rifs_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void rifs_string_free(char *s);

// Parses a step function from JSON into a new handle.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum RifsStatus rifs_step_from_json(const char *json, struct RifsStep **out);

// # Safety
// `step` must be NULL or a handle from this library and not yet freed.
void rifs_step_free(struct RifsStep *step);

// Canonical JSON of a step function.
//
// # Safety
// `step` must be a live handle; `out` must be writable.
enum RifsStatus rifs_step_to_json(const struct RifsStep *step, char **out);

// Decreasing rearrangement as a new handle.
//
// # Safety
// `step` must be a live handle; `out` must be writable.
enum RifsStatus rifs_rearrange(const struct RifsStep *step, struct RifsStep **out);

// Measure of `{|x| > lambda}`.
//
// # Safety
// `step` must be a live handle; `out` must be writable.
enum RifsStatus rifs_distribution(const struct RifsStep *step, double lambda, double *out);

// `x**(t)`.
//
// # Safety
// `step` must be a live handle; `out` must be writable.
enum RifsStatus rifs_maximal_eval(const struct RifsStep *step, double t, double *out);

// Whether `x ≺ y`. A negative `tol` selects the default tolerance.
//
// # Safety
// `x` and `y` must be live handles; `out` must be writable.
enum RifsStatus rifs_hlp_dominates(const struct RifsStep *x,
                                   const struct RifsStep *y,
                                   double tol,
                                   bool *out);

// Parses a space description from JSON into a new handle.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum RifsStatus rifs_space_from_json(const char *json, struct RifsSpace **out);

// # Safety
// `space` must be NULL or a handle from this library and not yet freed.
void rifs_space_free(struct RifsSpace *space);

// `‖x‖` in `space`.
//
// # Safety
// `space` and `step` must be live handles; `out` must be writable.
enum RifsStatus rifs_norm(const struct RifsSpace *space, const struct RifsStep *step, double *out);

// Fundamental function `φ(t)`.
//
// # Safety
// `space` must be a live handle; `out` must be writable.
enum RifsStatus rifs_fundamental(const struct RifsSpace *space, double t, double *out);

// Runs a named check (`reflexive`, `approx-compact`, `koc`, `embeds-l1`,
// `rbp`, `delta2`) and returns the verdict as JSON.
//
// # Safety
// `name` must be a NUL-terminated string, `space` a live handle, and `out`
// writable.
enum RifsStatus rifs_check_json(const char *name, const struct RifsSpace *space, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIFS_H */
