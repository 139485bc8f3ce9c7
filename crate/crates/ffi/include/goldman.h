#ifndef GOLDMAN_H
#define GOLDMAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the numeric values of the first four match the CLI exit codes.
 */
typedef enum GoldmanStatus {
  GOLDMAN_STATUS_OK = 0,
  GOLDMAN_STATUS_INVALID_INPUT = 2,
  GOLDMAN_STATUS_NO_STABILIZATION = 3,
  GOLDMAN_STATUS_NUMERICAL = 4,
  GOLDMAN_STATUS_NULL_POINTER = 6,
  GOLDMAN_STATUS_PANIC = 7,
} GoldmanStatus;

/**
 * Opaque surface handle.
 */
typedef struct GoldmanSurface GoldmanSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * One-holed torus with simple curve length `length` and twist `twist`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GoldmanStatus goldman_surface_holed_torus(double length,
                                               double twist,
                                               struct GoldmanSurface **out);

/**
 * Pair of pants with boundary lengths `l1`, `l2`, `l3`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GoldmanStatus goldman_surface_pants(double l1,
                                         double l2,
                                         double l3,
                                         struct GoldmanSurface **out);

/**
 * Loads a surface from the JSON surface file format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid handle slot.
 */
enum GoldmanStatus goldman_surface_from_json(const char *json, struct GoldmanSurface **out);

/**
 * Serializes a surface; free the result with `goldman_string_free`.
 *
 * # Safety
 * `surface` must be a live handle; `out` a valid string slot.
 */
enum GoldmanStatus goldman_surface_to_json(const struct GoldmanSurface *surface, char **out);

/**
 * New handle for the surface twisted by `s` along its distinguished curve.
 *
 * # Safety
 * `surface` must be a live handle; `out` a valid handle slot.
 */
enum GoldmanStatus goldman_surface_twist(const struct GoldmanSurface *surface,
                                         double s,
                                         struct GoldmanSurface **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `surface` must be null or a handle not yet freed.
 */
void goldman_surface_free(struct GoldmanSurface *surface);

/**
 * Length of the closed geodesic in the class of `word`.
 *
 * # Safety
 * `surface` must be a live handle, `word` NUL-terminated, `out` writable.
 */
enum GoldmanStatus goldman_class_length(const struct GoldmanSurface *surface,
                                        const char *word,
                                        double *out);

/**
 * Number of crossings of the closed geodesics of `x` and `y`.
 * `radius_cap` 0 selects the default.
 *
 * # Safety
 * `surface` must be a live handle, `x` and `y` NUL-terminated, `out` writable.
 */
enum GoldmanStatus goldman_intersection_number(const struct GoldmanSurface *surface,
                                               const char *x,
                                               const char *y,
                                               size_t radius_cap,
                                               size_t *out);

/**
 * The bracket as JSON `{"sum": [{"class", "coeff"}], "i", "terms_with_multiplicity", "radius_used",
 * "coincident_crossings"}`.
 * Free the result with `goldman_string_free`.
 *
 * # Safety
 * `surface` must be a live handle, `x` and `y` NUL-terminated, `out` writable.
 */
enum GoldmanStatus goldman_bracket_json(const struct GoldmanSurface *surface,
                                        const char *x,
                                        const char *y,
                                        size_t radius_cap,
                                        char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void goldman_string_free(char *s);

/**
 * Message for the last failure on this thread, empty after success. The
 * pointer stays valid until the next library call on the same thread.
 */
const char *goldman_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GOLDMAN_H */
