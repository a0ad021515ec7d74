#ifndef CUSPFORGE_H
#define CUSPFORGE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. The numeric values match the CLI exit codes where they overlap.
 */
typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_INVALID_INPUT = 1,
  CF_STATUS_NOT_PROPORTIONAL = 2,
  CF_STATUS_INTERNAL = 3,
  CF_STATUS_NULL_POINTER = 4,
  CF_STATUS_PANIC = 5,
} CfStatus;

/**
 * Opaque configuration handle. Release with [`cf_configuration_free`].
 */
typedef struct CfConfiguration CfConfiguration;

/**
 * Summary of the singular locus of a configuration.
 */
typedef struct CfSingularSummary {
  size_t components;
  size_t singular_points;
  size_t incidence_sum;
  bool proportional;
  bool vacuous;
  bool intersecting;
} CfSingularSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cf_last_error_message(void);

/**
 * Parses a configuration from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CfStatus cf_configuration_from_json(const char *json, struct CfConfiguration **out);

/**
 * Looks up a catalog entry (`hirzebruch`, `d14`, `holzapfel`).
 *
 * # Safety
 * `key` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CfStatus cf_configuration_catalog(const char *key, struct CfConfiguration **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `c` must be null or a handle returned by this library that was not freed yet.
 */
void cf_configuration_free(struct CfConfiguration *c);

/**
 * Number of curves in the configuration, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t cf_configuration_len(const struct CfConfiguration *c);

/**
 * Serializes a configuration in canonical curve order. Free the result with [`cf_string_free`].
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum CfStatus cf_configuration_to_json(const struct CfConfiguration *c, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library that was not freed yet.
 */
void cf_string_free(char *s);

/**
 * Computes the singular locus. Non-proportional configurations still fill `out`.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum CfStatus cf_singular_locus(const struct CfConfiguration *c, struct CfSingularSummary *out);

/**
 * Full singular-locus report as JSON. Free the result with [`cf_string_free`].
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum CfStatus cf_singular_locus_json(const struct CfConfiguration *c, char **out);

/**
 * Pulls a proportional configuration back along `diag(alpha, beta)` onto `E_{m1} x E_{m2}`.
 * `alpha` and `beta` are literals such as `"1+2w"`.
 *
 * # Safety
 * `c` must be a live handle, the strings NUL-terminated and `out` a valid pointer.
 */
enum CfStatus cf_pullback(const struct CfConfiguration *c,
                          const char *alpha,
                          const char *beta,
                          uint64_t m1,
                          uint64_t m2,
                          struct CfConfiguration **out);

/**
 * Runs a series recipe (JSON) and returns `{"base": record, "terms": [record, ...]}`.
 * Free the result with [`cf_string_free`].
 *
 * # Safety
 * `recipe` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CfStatus cf_series_json(const char *recipe, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUSPFORGE_H */
