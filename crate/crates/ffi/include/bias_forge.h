#ifndef BIAS_FORGE_H
#define BIAS_FORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_ARGUMENT = 1,
  BF_STATUS_INVALID_UTF8 = 2,
  BF_STATUS_INVALID_ARGUMENT = 3,
  // Source code does not parse.
  BF_STATUS_PARSE_ERROR = 4,
  // A transform could not be applied (e.g. rename name space exhausted).
  BF_STATUS_TRANSFORM_FAILED = 5,
  BF_STATUS_CONFIG_ERROR = 6,
  BF_STATUS_DATA_ERROR = 7,
  BF_STATUS_IO_ERROR = 8,
  // The library panicked; the call had no effect that can be relied on.
  BF_STATUS_INTERNAL = 9,
  // A pipeline stage finished but flagged or failed some items.
  BF_STATUS_PARTIAL = 10,
} BfStatus;

// A loaded dataset.
typedef struct BfDataset BfDataset;

// Robustness report computed from judgment records.
typedef struct BfReport BfReport;

// One biased variant with its provenance.
typedef struct BfVariant BfVariant;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into the library on this thread.
const char *bf_last_error(void);

// Library version, a static string.
const char *bf_version(void);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void bf_string_free(char *s);

// Load a dataset from a JSON Lines file.
//
// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum BfStatus bf_dataset_load(const char *path, struct BfDataset **out);

// The bundled mini-corpus, comments stripped.
//
// # Safety
// `out` must be a valid pointer.
enum BfStatus bf_dataset_mini_corpus(struct BfDataset **out);

// Number of samples in the dataset.
//
// # Safety
// `ds` must be a live dataset handle and `out` a valid pointer.
enum BfStatus bf_dataset_sample_count(const struct BfDataset *ds, uintptr_t *out);

// Id of sample `index`, as a string to free with `bf_string_free`.
//
// # Safety
// `ds` must be a live dataset handle and `out` a valid pointer.
enum BfStatus bf_dataset_sample_id(const struct BfDataset *ds, uintptr_t index, char **out);

// # Safety
// `ds` must be null or a handle from this library not yet freed.
void bf_dataset_free(struct BfDataset *ds);

// Apply `bias` (e.g. `"self_declared"`, `"variable_rename:24"`) to sample
// `sample_id` of `ds`. Misleading comments come from the offline canned
// generator.
//
// # Safety
// Handles and strings must be valid; `out` must be a valid pointer.
enum BfStatus bf_transform_sample(const struct BfDataset *ds,
                                  const char *sample_id,
                                  const char *bias,
                                  uint64_t seed,
                                  struct BfVariant **out);

// Apply `bias` to free-standing `source` in `language` (`"cpp"`,
// `"python"`, `"java"`, `"javascript"`, `"go"`).
//
// # Safety
// Strings must be valid C strings; `out` must be a valid pointer.
enum BfStatus bf_transform_source(const char *language,
                                  const char *source,
                                  const char *bias,
                                  uint64_t seed,
                                  struct BfVariant **out);

// Transformed source, as a string to free with `bf_string_free`.
//
// # Safety
// `v` must be a live variant handle and `out` a valid pointer.
enum BfStatus bf_variant_source(const struct BfVariant *v, char **out);

// The variant with its provenance as one JSON object.
//
// # Safety
// `v` must be a live variant handle and `out` a valid pointer.
enum BfStatus bf_variant_json(const struct BfVariant *v, char **out);

// Reconstruct the original source from the variant's provenance.
//
// # Safety
// `v` must be a live variant handle and `out` a valid pointer.
enum BfStatus bf_variant_invert(const struct BfVariant *v, char **out);

// True when the variant was flagged (misleading-comment generation failed).
//
// # Safety
// `v` must be a live variant handle and `out` a valid pointer.
enum BfStatus bf_variant_is_flagged(const struct BfVariant *v, bool *out);

// # Safety
// `v` must be null or a handle from this library not yet freed.
void bf_variant_free(struct BfVariant *v);

// Build a report from judgment records in CSV form (columns `judge_id,
// language, condition, paradigm, item_id, label, trial_index, verdict`).
//
// # Safety
// `csv` must be a valid C string and `out` a valid pointer.
enum BfStatus bf_report_from_csv(const char *csv, double dead_band, struct BfReport **out);

// Rendered text table.
//
// # Safety
// `r` must be a live report handle and `out` a valid pointer.
enum BfStatus bf_report_table(const struct BfReport *r, char **out);

// Per-condition rows as CSV.
//
// # Safety
// `r` must be a live report handle and `out` a valid pointer.
enum BfStatus bf_report_csv(const struct BfReport *r, char **out);

// Grouped MAD values as CSV.
//
// # Safety
// `r` must be a live report handle and `out` a valid pointer.
enum BfStatus bf_report_mad_csv(const struct BfReport *r, char **out);

// # Safety
// `r` must be null or a handle from this library not yet freed.
void bf_report_free(struct BfReport *r);

// Run one pipeline stage (`"ingest"`, `"inject"`, `"validate"`,
// `"evaluate"`, `"report"`) or `"run"` for all of them. `out_dir` may be
// null to use the config's `out_dir`. Returns `BF_STATUS_PARTIAL` when the
// stage finished with flagged or failed items.
//
// # Safety
// `config_path` and `stage` must be valid C strings; `out_dir` may be null.
enum BfStatus bf_pipeline_run(const char *config_path, const char *stage, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIAS_FORGE_H */
