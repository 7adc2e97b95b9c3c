/* Copyright 2026 The SaladBench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the SaladBench library.
 *
 * Every fallible call returns an sb_status. On failure the message is
 * available from sb_last_error() on the calling thread until the next call
 * into the library from that thread. Strings returned through char** out
 * parameters are owned by the caller and released with sb_string_free().
 * Handles are released with their matching *_free function; passing NULL to
 * any *_free function is a no-op.
 */

#ifndef SALADBENCH_SALADBENCH_H_
#define SALADBENCH_SALADBENCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SALADBENCH_BUILDING_LIBRARY)
#define SB_API __declspec(dllexport)
#else
#define SB_API __declspec(dllimport)
#endif
#else
#define SB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sb_status {
  SB_OK = 0,
  SB_ERR_CONFIG = 1,   /* bad arguments or configuration */
  SB_ERR_DATA = 2,     /* malformed or insufficient data */
  SB_ERR_PROVIDER = 3, /* provider transport or contract violation */
  SB_ERR_RUNTIME = 4,  /* numerical failure such as training divergence */
  SB_ERR_INTERNAL = 5  /* anything else */
} sb_status;

typedef struct sb_dataset sb_dataset;
typedef struct sb_model sb_model;
typedef struct sb_provider sb_provider;
typedef struct sb_pbsmt sb_pbsmt;

SB_API const char* sb_version(void);
SB_API const char* sb_last_error(void);
SB_API void sb_string_free(char* s);

/* Run configurations (JSON). */
SB_API sb_status sb_default_config(char** out_json);
SB_API sb_status sb_resolve_config(const char* config_json, char** out_json);
/* Runs the configured command; the summary lists the artifacts written. */
SB_API sb_status sb_run(const char* config_json, char** out_summary_json);

/* Text utilities. Outputs are space-joined lower-case tokens. */
SB_API sb_status sb_tokenize(const char* text, char** out);
/* kind: "sort", "reverse" or "shuffle" (seeded). */
SB_API sb_status sb_reorder_text(const char* kind, const char* text, uint64_t seed, char** out);

/* Datasets. format: "tsv" or "jsonl"; task: "single" or "pair";
 * default_label may be NULL. */
SB_API sb_status sb_dataset_load(const char* path, const char* format, const char* task,
                                 const char* const* labels, size_t n_labels,
                                 const char* default_label, sb_dataset** out);
SB_API void sb_dataset_free(sb_dataset* ds);
SB_API size_t sb_dataset_size(const sb_dataset* ds);
SB_API sb_status sb_dataset_checksum(const sb_dataset* ds, char** out);

/* Embedded toy models. train_config_json holds the "train" section of a run
 * config and may be NULL for the defaults. */
SB_API sb_status sb_model_train(const sb_dataset* ds, const char* train_config_json, uint64_t seed,
                                sb_model** out);
SB_API sb_status sb_model_load(const char* path, sb_model** out);
SB_API sb_status sb_model_save(const sb_model* model, const char* path);
SB_API void sb_model_free(sb_model* model);
SB_API size_t sb_model_classes(const sb_model* model);
/* Writes n_classes probabilities to probs; text_b may be NULL. */
SB_API sb_status sb_model_predict(const sb_model* model, const char* text_a, const char* text_b,
                                  double* probs, size_t n_probs);

/* Providers. kind: "embedded" (location = params file), "replay"
 * (location = predictions file, saliency_path optional) or "http"
 * (location = base URL). */
SB_API sb_status sb_provider_open(const char* kind, const char* location, size_t n_classes,
                                  const char* saliency_path, int supports_saliency,
                                  sb_provider** out);
SB_API sb_status sb_provider_from_model(const sb_model* model, sb_provider** out);
SB_API void sb_provider_free(sb_provider* provider);
/* Predictions as JSON lines {"id", "probs"}, in dataset order. */
SB_API sb_status sb_provider_predict(const sb_provider* provider, const sb_dataset* ds,
                                     char** out_jsonl);

/* PBSMT generators. */
SB_API sb_status sb_pbsmt_train(const sb_dataset* ds, int label, sb_pbsmt** out);
SB_API sb_status sb_pbsmt_load(const char* dir, sb_pbsmt** out);
SB_API sb_status sb_pbsmt_save(const sb_pbsmt* g, const char* dir);
SB_API void sb_pbsmt_free(sb_pbsmt* g);
SB_API sb_status sb_pbsmt_decode(const sb_pbsmt* g, const char* text, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SALADBENCH_SALADBENCH_H_ */
