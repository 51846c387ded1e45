/* Copyright 2026 The BioFed Authors
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

/* C interface to the biofed shared library.
 *
 * Every call returns a biofed_status. On failure the calling thread's last
 * error holds a message and the fine-grained error name; both stay valid
 * until the next failing call on that thread. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * biofed_string_free. Handles are opaque and released with their _free
 * function; passing NULL to any _free function is a no-op.
 */

#ifndef BIOFED_BIOFED_H_
#define BIOFED_BIOFED_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BIOFED_API __declspec(dllexport)
#else
#define BIOFED_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum biofed_status {
  BIOFED_OK = 0,
  BIOFED_ERR_INVALID_ARGUMENT = 1,
  BIOFED_ERR_VALIDATION = 2,
  BIOFED_ERR_ALREADY_EXISTS = 3,
  BIOFED_ERR_MISSING_FILE = 4,
  BIOFED_ERR_DATA = 5,
  BIOFED_ERR_IO = 6,
  BIOFED_ERR_PROTOCOL = 7,
  BIOFED_ERR_VERSION_MISMATCH = 8,
  BIOFED_ERR_TIMEOUT = 9,
  BIOFED_ERR_CONNECTION = 10,
  BIOFED_ERR_ROUND_FAILED = 11,
  BIOFED_ERR_NUMERIC = 12,
  BIOFED_ERR_NOT_CLOSE = 13,
  BIOFED_ERR_INTERNAL = 14
} biofed_status;

typedef struct biofed_config biofed_config;
typedef struct biofed_twin_store biofed_twin_store;
typedef struct biofed_model biofed_model;

/* Summary of a finished run. Accuracies are -1 when the model was not run. */
typedef struct biofed_run_summary {
  uint32_t rounds;
  double federated_accuracy;
  double centralized_accuracy;
  /* 1 close, 0 not close, -1 no comparison. */
  int32_t close;
  double accuracy_delta;
  uint64_t twin_records;
  uint64_t frames_audited;
} biofed_run_summary;

BIOFED_API const char* biofed_version(void);
BIOFED_API const char* biofed_status_name(biofed_status status);
BIOFED_API const char* biofed_last_error(void);
/* Kebab-case name of the underlying error, e.g. "version-mismatch". */
BIOFED_API const char* biofed_last_error_code(void);
BIOFED_API void biofed_string_free(char* s);

/* Configuration. */
BIOFED_API biofed_status biofed_config_default(biofed_config** out);
BIOFED_API biofed_status biofed_config_load(const char* path, biofed_config** out);
BIOFED_API biofed_status biofed_config_from_json(const char* json, biofed_config** out);
/* Merges a JSON merge patch and revalidates; `cfg` is unchanged on error. */
BIOFED_API biofed_status biofed_config_patch(biofed_config* cfg, const char* json_patch);
BIOFED_API biofed_status biofed_config_to_json(const biofed_config* cfg, char** out_json);
BIOFED_API void biofed_config_free(biofed_config* cfg);

/* Commands. `force` nonzero allows replacing a non-empty output directory. */
BIOFED_API biofed_status biofed_simulate(const biofed_config* cfg, const char* out_dir, int force,
                                         biofed_run_summary* summary);
BIOFED_API biofed_status biofed_centralized(const biofed_config* cfg, const char* out_dir, int force,
                                            biofed_run_summary* summary);
BIOFED_API biofed_status biofed_serve(const biofed_config* cfg, const char* out_dir, int force,
                                      biofed_run_summary* summary);
/* Paths of the written shard files, newline-separated, go to `out_paths`
 * when it is not NULL. */
BIOFED_API biofed_status biofed_partition(const biofed_config* cfg, const char* out_dir, int force,
                                          char** out_paths);
/* host may be NULL; port and protocol_version of 0 keep the shard file's
 * values; connect_timeout_ms of 0 keeps the default. */
BIOFED_API biofed_status biofed_client(const char* shard_file, const char* host, uint16_t port,
                                       uint16_t protocol_version, uint32_t connect_timeout_ms);
/* Renders the report; `out_text` receives the summary table. `close` is set
 * to 1/0, or -1 when only one model was evaluated. */
BIOFED_API biofed_status biofed_report(const char* run_dir, double accuracy_threshold, int force,
                                       char** out_text, int* close);

/* Twin registry. Opens <run_dir>/twins.jsonl with the run's vocabulary. */
BIOFED_API biofed_status biofed_twin_store_open(const char* run_dir, biofed_twin_store** out);
BIOFED_API size_t biofed_twin_store_size(const biofed_twin_store* store);
/* NULL filters match everything; round < 0 matches every round. Output is a
 * JSON array when as_json is nonzero, otherwise a text table. */
BIOFED_API biofed_status biofed_twin_query(const biofed_twin_store* store, const char* class_name,
                                           const char* site, int64_t round, int as_json, char** out);
BIOFED_API void biofed_twin_store_free(biofed_twin_store* store);

/* Model checkpoints. */
BIOFED_API biofed_status biofed_model_load(const char* checkpoint_path, biofed_model** out);
BIOFED_API size_t biofed_model_num_values(const biofed_model* model);
BIOFED_API biofed_status biofed_model_schema_hash(const biofed_model* model, char** out_hex);
/* 1 when both models hold bit-identical values under the same schema. */
BIOFED_API int biofed_model_equal(const biofed_model* a, const biofed_model* b);
BIOFED_API void biofed_model_free(biofed_model* model);

#ifdef __cplusplus
}
#endif

#endif /* BIOFED_BIOFED_H_ */
