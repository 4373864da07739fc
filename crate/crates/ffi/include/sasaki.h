#ifndef SASAKI_H
#define SASAKI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SasakiStatus {
  SASAKI_STATUS_OK = 0,
  SASAKI_STATUS_NULL_POINTER = 1,
  SASAKI_STATUS_INVALID_UTF8 = 2,
  SASAKI_STATUS_PARSE = 3,
  SASAKI_STATUS_IO = 4,
  SASAKI_STATUS_INVALID_INPUT = 5,
  SASAKI_STATUS_UNSUPPORTED = 6,
  SASAKI_STATUS_DEGENERATE = 7,
  SASAKI_STATUS_PANIC = 8,
} SasakiStatus;

/**
 * Opaque handle to a parsed model evaluated at its point.
 */
typedef struct SasakiModel SasakiModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *sasaki_last_error(void);

/**
 * Parses a TOML model document. On success `*out` owns a handle to free with [`sasaki_model_free`].
 *
 * # Safety
 * `source` must be a nul-terminated string and `out` a valid pointer.
 */
enum SasakiStatus sasaki_model_parse(const char *source, struct SasakiModel **out);

/**
 * Reads and parses a model document from a file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum SasakiStatus sasaki_model_open(const char *path, struct SasakiModel **out);

/**
 * # Safety
 * `model` must come from this library and not be freed twice. Null is ignored.
 */
void sasaki_model_free(struct SasakiModel *model);

/**
 * Base dimension and fiber rank.
 *
 * # Safety
 * All pointers must be valid.
 */
enum SasakiStatus sasaki_model_dims(const struct SasakiModel *model,
                                    size_t *base_dim,
                                    size_t *fiber_rank);

/**
 * Scalar curvature at the model's point.
 *
 * # Safety
 * All pointers must be valid.
 */
enum SasakiStatus sasaki_model_scalar_curvature(const struct SasakiModel *model, double *out);

/**
 * Sectional curvature of the plane spanned by two tangent vectors, each given as
 * `len = base_dim + fiber_rank` coordinates (horizontal part first).
 *
 * # Safety
 * `first` and `second` must point to `len` doubles; `out` must be valid.
 */
enum SasakiStatus sasaki_model_sectional(const struct SasakiModel *model,
                                         const double *first,
                                         const double *second,
                                         size_t len,
                                         double *out);

/**
 * Full curvature report as JSON. Free the string with [`sasaki_string_free`].
 *
 * # Safety
 * `model` and `out` must be valid.
 */
enum SasakiStatus sasaki_model_report_json(const struct SasakiModel *model,
                                           size_t samples,
                                           uint64_t seed,
                                           char **out);

/**
 * Runs a property suite by name (or `all`). `*passed` is 1 when every check passes.
 *
 * # Safety
 * `suite` must be a nul-terminated string and `passed` valid.
 */
enum SasakiStatus sasaki_verify(const char *suite, uint64_t seed, int32_t *passed);

/**
 * # Safety
 * `text` must come from this library. Null is ignored.
 */
void sasaki_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SASAKI_H */
