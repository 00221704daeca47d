#ifndef GECTOOL_H
#define GECTOOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GtStatus {
  GT_STATUS_OK = 0,
  GT_STATUS_NULL_POINTER = 1,
  GT_STATUS_INVALID_UTF8 = 2,
  GT_STATUS_INVALID_ARGUMENT = 3,
  GT_STATUS_PARSE = 4,
  GT_STATUS_UNDEFINED = 5,
  GT_STATUS_PANIC = 6,
} GtStatus;

/**
 * Noiser handle from [`gt_noiser_new`].
 */
typedef struct GtNoiser GtNoiser;

/**
 * Incremental scorer handle from [`gt_scorer_new`].
 */
typedef struct GtScorer GtScorer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or "" after a
 * successful one. Valid until the next call on this thread.
 */
const char *gt_last_error(void);

/**
 * Library version as a static string.
 */
const char *gt_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void gt_string_free(char *s);

/**
 * F-beta of a precision and recall, both in [0, 1].
 *
 * # Safety
 * `out` must point to writable memory for one double.
 */
enum GtStatus gt_f_beta(double precision, double recall, double beta, double *out);

/**
 * Share of non-match edges in the alignment of two whitespace-tokenized
 * sentences. Returns `GT_STATUS_UNDEFINED` when both are empty.
 *
 * # Safety
 * `source` and `target` must be NUL-terminated strings; `out` must be writable.
 */
enum GtStatus gt_error_rate(const char *source, const char *target, double *out);

/**
 * Token-level edit distance between two whitespace-tokenized sentences.
 *
 * # Safety
 * `source` and `target` must be NUL-terminated strings; `out` must be writable.
 */
enum GtStatus gt_align_cost(const char *source, const char *target, size_t *out);

/**
 * Tokenizes `text` with the rule tokenizer; the tokens are joined by single spaces.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum GtStatus gt_tokenize(const char *text, char **out);

/**
 * M2 record for one whitespace-tokenized parallel pair, annotator 0.
 *
 * # Safety
 * `source` and `target` must be NUL-terminated strings; `out` must be writable.
 */
enum GtStatus gt_extract_m2(const char *source, const char *target, bool merge_swaps, char **out);

/**
 * Creates a noiser.
 *
 * `lang` names a built-in profile; `profile_json` overrides its fields, or
 * defines the whole profile when `lang` is NULL. `vocabulary` holds one
 * `word[<TAB>freq]` per line and may be NULL when the profile never inserts.
 *
 * # Safety
 * String arguments must be NULL or NUL-terminated; `out` must be writable.
 * The handle must be released with [`gt_noiser_free`].
 */
enum GtStatus gt_noiser_new(const char *lang,
                            const char *profile_json,
                            uint64_t seed,
                            const char *vocabulary,
                            struct GtNoiser **out);

/**
 * Corrupts one sentence as record `record_index`. With `pretokenized` the
 * input is split on whitespace, otherwise it goes through the rule tokenizer.
 * The result is space-joined tokens.
 *
 * # Safety
 * `noiser` must come from [`gt_noiser_new`]; `sentence` must be NUL-terminated;
 * `out` must be writable.
 */
enum GtStatus gt_noiser_corrupt(const struct GtNoiser *noiser,
                                const char *sentence,
                                uint64_t record_index,
                                bool pretokenized,
                                char **out);

/**
 * # Safety
 * `noiser` must be NULL or a handle from [`gt_noiser_new`], not yet freed.
 */
void gt_noiser_free(struct GtNoiser *noiser);

/**
 * # Safety
 * `out` must be writable. The handle must be released with [`gt_scorer_free`].
 */
enum GtStatus gt_scorer_new(double beta, struct GtScorer **out);

/**
 * Adds one sentence: `gold_m2` is a single M2 record, `hypothesis` the
 * whitespace-tokenized corrected sentence. Sentences must be added in corpus order.
 *
 * # Safety
 * `scorer` must come from [`gt_scorer_new`]; strings must be NUL-terminated.
 */
enum GtStatus gt_scorer_add(struct GtScorer *scorer, const char *gold_m2, const char *hypothesis);

/**
 * Report over the sentences added so far, as JSON.
 *
 * # Safety
 * `scorer` must come from [`gt_scorer_new`]; `out` must be writable.
 */
enum GtStatus gt_scorer_report_json(const struct GtScorer *scorer, char **out);

/**
 * # Safety
 * `scorer` must be NULL or a handle from [`gt_scorer_new`], not yet freed.
 */
void gt_scorer_free(struct GtScorer *scorer);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GECTOOL_H */
