#ifndef ZHSTANCE_H
#define ZHSTANCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZsStatus {
  ZS_STATUS_OK = 0,
  ZS_STATUS_NULL_ARGUMENT = 1,
  ZS_STATUS_INVALID_UTF8 = 2,
  ZS_STATUS_IO = 3,
  ZS_STATUS_PARSE = 4,
  ZS_STATUS_INVALID = 5,
  ZS_STATUS_PANIC = 6,
} ZsStatus;

typedef struct ZsConverter ZsConverter;

/**
 * Pipeline with its lexicon, HMM and conversion table loaded.
 */
typedef struct ZsPipeline ZsPipeline;

/**
 * Dictionary segmenter with optional HMM and conversion table.
 */
typedef struct ZsSegmenter ZsSegmenter;

/**
 * One-vs-rest metrics for a single positive class.
 */
typedef struct ZsMetrics {
  double accuracy;
  double precision;
  double recall;
  double f1;
} ZsMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *zs_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void zs_string_free(char *s);

/**
 * Loads a segmenter. `hmm_path` and `convert_table_path` may be null.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` is valid for writing.
 */
enum ZsStatus zs_segmenter_new(const char *dict_path,
                               const char *hmm_path,
                               const char *convert_table_path,
                               struct ZsSegmenter **out);

/**
 * Segments `text` and writes the space-joined tokens to `*out`.
 *
 * # Safety
 * `seg` comes from [`zs_segmenter_new`]; `text` is NUL-terminated; `out` is
 * valid for writing.
 */
enum ZsStatus zs_segmenter_cut(const struct ZsSegmenter *seg, const char *text, char **out);

/**
 * # Safety
 * `seg` is null or comes from [`zs_segmenter_new`] and is not used afterwards.
 */
void zs_segmenter_free(struct ZsSegmenter *seg);

/**
 * # Safety
 * `path` is NUL-terminated; `out` is valid for writing.
 */
enum ZsStatus zs_converter_new(const char *path, struct ZsConverter **out);

/**
 * Converts traditional characters in `text` to simplified.
 *
 * # Safety
 * `conv` comes from [`zs_converter_new`]; `text` is NUL-terminated; `out`
 * is valid for writing.
 */
enum ZsStatus zs_converter_convert(const struct ZsConverter *conv, const char *text, char **out);

/**
 * # Safety
 * `conv` is null or comes from [`zs_converter_new`] and is not used afterwards.
 */
void zs_converter_free(struct ZsConverter *conv);

/**
 * Metrics for class `positive` of an `n` x `n` confusion matrix given
 * row-major in `counts` (rows are true labels, columns predictions).
 *
 * # Safety
 * `counts` points to `n * n` values; `out` is valid for writing.
 */
enum ZsStatus zs_metrics(const uint64_t *counts, size_t n, size_t positive, struct ZsMetrics *out);

/**
 * Builds a pipeline from a JSON config of the same shape as the `config`
 * field of a report. Unset fields take their defaults.
 *
 * # Safety
 * `config_json` is NUL-terminated; `out` is valid for writing.
 */
enum ZsStatus zs_pipeline_new(const char *config_json, struct ZsPipeline **out);

/**
 * Runs cross-validation and writes the JSON report to `*out`.
 *
 * # Safety
 * `p` comes from [`zs_pipeline_new`]; `out` is valid for writing.
 */
enum ZsStatus zs_pipeline_crossval(const struct ZsPipeline *p, char **out);

/**
 * Trains on the non-test accounts, scores the test accounts and writes the
 * JSON report to `*out`. The config must name a test-id file.
 *
 * # Safety
 * `p` comes from [`zs_pipeline_new`]; `out` is valid for writing.
 */
enum ZsStatus zs_pipeline_test(const struct ZsPipeline *p, char **out);

/**
 * # Safety
 * `p` is null or comes from [`zs_pipeline_new`] and is not used afterwards.
 */
void zs_pipeline_free(struct ZsPipeline *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZHSTANCE_H */
