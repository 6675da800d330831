#ifndef HURWITZ_TR_H
#define HURWITZ_TR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum HtStatus {
  HT_STATUS_OK = 0,
  HT_STATUS_NULL_POINTER = 1,
  HT_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed input: JSON, rationals, partitions, caps.
   */
  HT_STATUS_PARSE = 3,
  /**
   * Well-formed input the library does not accept, such as LM <= 1.
   */
  HT_STATUS_INVALID = 4,
  /**
   * A cross-check or verification suite failed; the JSON is still returned.
   */
  HT_STATUS_CHECK_FAILED = 5,
  /**
   * Any other library error, or a caught panic.
   */
  HT_STATUS_INTERNAL = 6,
} HtStatus;

/**
 * Opaque spectral curve.
 */
typedef struct HtCurve HtCurve;

/**
 * Opaque recursion engine; memoises ω_{g,n} across calls.
 */
typedef struct HtRecursion HtRecursion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ht_last_error(void);

/**
 * Frees a string returned through an `out` parameter.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ht_string_free(char *s);

/**
 * Builds a curve from a JSON config such as
 * `{"G":["1","1"],"S":["0","0","1/2"],"gamma":"1"}`.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out` must be writable.
 */
enum HtStatus ht_curve_new(const char *config, struct HtCurve **out);

/**
 * # Safety
 * `c` must come from [`ht_curve_new`] and not have been freed.
 */
void ht_curve_free(struct HtCurve *c);

/**
 * X, Y, φ and branch data as JSON, polynomials as ascending coefficients.
 *
 * # Safety
 * `c` must be a live curve handle; `out` must be writable.
 */
enum HtStatus ht_curve_json(const struct HtCurve *c, char **out);

/**
 * A recursion engine for a copy of the curve. The curve handle stays owned
 * by the caller.
 *
 * # Safety
 * `c` must be a live curve handle; `out` must be writable.
 */
enum HtStatus ht_recursion_new(const struct HtCurve *c, struct HtRecursion **out);

/**
 * # Safety
 * `r` must come from [`ht_recursion_new`] and not have been freed.
 */
void ht_recursion_free(struct HtRecursion *r);

/**
 * ω_{g,n} as JSON `{g, n, numerator, denominator, variables}`.
 *
 * # Safety
 * `r` must be a live engine handle; `out` must be writable.
 */
enum HtStatus ht_recursion_omega(const struct HtRecursion *r, uint32_t g, uint32_t n, char **out);

/**
 * Coefficients of F̃_{g,n} from ω_{g,n} through |μ| ≤ order, compared with
 * the enumeration oracle. Returns `CheckFailed` (with the JSON) on disagreement.
 *
 * # Safety
 * `r` must be a live engine handle; `out` must be writable.
 */
enum HtStatus ht_recursion_hurwitz(const struct HtRecursion *r,
                                   uint32_t g,
                                   uint32_t n,
                                   uint32_t order,
                                   char **out);

/**
 * Rows `{mu, nu, d, value, genus, connected}` of H^d_G(μ, ν) for d ≤ dmax.
 * `g` lists g_1,…,g_M comma-separated; `mu` and `nu` list parts.
 *
 * # Safety
 * All strings must be NUL-terminated; `out` must be writable.
 */
enum HtStatus ht_hurwitz(const char *g,
                         const char *mu,
                         const char *nu,
                         uint32_t dmax,
                         bool connected,
                         char **out);

/**
 * Runs a verification suite (or `all`) with the default caps and the
 * environment overrides. Returns `CheckFailed` when any check fails; the
 * report is written either way.
 *
 * # Safety
 * `suite` must be NUL-terminated; `out` must be writable.
 */
enum HtStatus ht_verify(const char *suite, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HURWITZ_TR_H */
