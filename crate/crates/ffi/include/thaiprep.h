#ifndef THAIPREP_H
#define THAIPREP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ThaiprepStatus {
  THAIPREP_STATUS_OK = 0,
  THAIPREP_STATUS_NULL_POINTER = 1,
  THAIPREP_STATUS_INVALID_UTF8 = 2,
  THAIPREP_STATUS_INVALID_ARGUMENT = 3,
  THAIPREP_STATUS_IO = 4,
  THAIPREP_STATUS_PANIC = 5,
} ThaiprepStatus;

// Opaque normalizer handle.
typedef struct ThaiprepNormalizer ThaiprepNormalizer;

// Opaque tokenizer handle.
typedef struct ThaiprepTokenizer ThaiprepTokenizer;

// Boundary precision/recall/F1 with raw counts.
typedef struct ThaiprepPrf {
  double precision;
  double recall;
  double f1;
  uint64_t tp;
  uint64_t fp;
  uint64_t fn_;
} ThaiprepPrf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *thaiprep_last_error(void);

// Library version as a static NUL-terminated string.
const char *thaiprep_version(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void thaiprep_string_free(char *s);

// Creates a normalizer. `config_toml` is the text of a config file, or
// null for defaults.
//
// # Safety
// `config_toml` must be null or NUL-terminated; `out` must be valid for writes.
enum ThaiprepStatus thaiprep_normalizer_new(const char *config_toml,
                                            struct ThaiprepNormalizer **out);

// # Safety
// `normalizer` must be null or a handle from `thaiprep_normalizer_new`.
void thaiprep_normalizer_free(struct ThaiprepNormalizer *normalizer);

// Normalizes `text`; the result goes to `*out`.
//
// # Safety
// `normalizer` must be a live handle, `text` NUL-terminated, `out` valid for writes.
enum ThaiprepStatus thaiprep_normalize(const struct ThaiprepNormalizer *normalizer,
                                       const char *text,
                                       char **out);

// Creates a tokenizer over the lexicon files in `lexicon_paths`.
//
// # Safety
// `lexicon_paths` must point to `n_paths` NUL-terminated strings (it may
// be null when `n_paths` is 0); `out` must be valid for writes.
enum ThaiprepStatus thaiprep_tokenizer_new(const char *const *lexicon_paths,
                                           size_t n_paths,
                                           struct ThaiprepTokenizer **out);

// # Safety
// `tokenizer` must be null or a handle from `thaiprep_tokenizer_new`.
void thaiprep_tokenizer_free(struct ThaiprepTokenizer *tokenizer);

// Tokenizes `text` into a JSON array of `{surface, kind, start, end}`
// objects (char offsets).
//
// # Safety
// `tokenizer` must be a live handle, `text` NUL-terminated, `out` valid for writes.
enum ThaiprepStatus thaiprep_tokenize_json(const struct ThaiprepTokenizer *tokenizer,
                                           const char *text,
                                           char **out);

// Tokenizes `text` into segmented form: tokens joined by `|`, or by a
// space where the text had whitespace.
//
// # Safety
// `tokenizer` must be a live handle, `text` NUL-terminated, `out` valid for writes.
enum ThaiprepStatus thaiprep_tokenize_segmented(const struct ThaiprepTokenizer *tokenizer,
                                                const char *text,
                                                char **out);

// `exp(mean_nll)`; fails on negative or non-finite input.
//
// # Safety
// `out` must be valid for writes.
enum ThaiprepStatus thaiprep_perplexity(double mean_nll, double *out);

// Boundary P/R/F1 of two label arrays of length `len` (nonzero = boundary).
//
// # Safety
// `predicted` and `gold` must point to `len` bytes each (or be null when
// `len` is 0); `out` must be valid for writes.
enum ThaiprepStatus thaiprep_boundary_prf(const uint8_t *predicted,
                                          const uint8_t *gold,
                                          size_t len,
                                          struct ThaiprepPrf *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THAIPREP_H */
