// Copyright 2026 The BioFed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "biofed/biofed.h"

#include <cstring>
#include <string>

#include "app/config.hpp"
#include "app/pipeline.hpp"
#include "common/error.hpp"
#include "common/sha256.hpp"
#include "nn/checkpoint.hpp"
#include "twin/registry.hpp"

struct biofed_config {
  biofed::app::RunConfig cfg;
};

struct biofed_twin_store {
  std::unique_ptr<biofed::twin::TwinStore> store;
};

struct biofed_model {
  biofed::nn::ModelParameters params;
};

namespace {

using biofed::Error;
using biofed::ErrorCode;

thread_local std::string g_last_error;
thread_local std::string g_last_code;

biofed_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return BIOFED_ERR_INVALID_ARGUMENT;
    case ErrorCode::kValidation:
    case ErrorCode::kUnknownFilter:
    case ErrorCode::kMismatchedTestSet: return BIOFED_ERR_VALIDATION;
    case ErrorCode::kAlreadyExists: return BIOFED_ERR_ALREADY_EXISTS;
    case ErrorCode::kMissingFile: return BIOFED_ERR_MISSING_FILE;
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kLabelOutOfRange:
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kDuplicate:
    case ErrorCode::kUnsupportedFormat:
    case ErrorCode::kCorruptImage:
    case ErrorCode::kClassWithoutTestSamples:
    case ErrorCode::kTooFewSamples: return BIOFED_ERR_DATA;
    case ErrorCode::kIo: return BIOFED_ERR_IO;
    case ErrorCode::kTruncatedFrame:
    case ErrorCode::kUnknownTag:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kMalformedPayload:
    case ErrorCode::kOversizeFrame:
    case ErrorCode::kProtocol: return BIOFED_ERR_PROTOCOL;
    case ErrorCode::kVersionMismatch: return BIOFED_ERR_VERSION_MISMATCH;
    case ErrorCode::kTimeout: return BIOFED_ERR_TIMEOUT;
    case ErrorCode::kConnectionRefused:
    case ErrorCode::kDisconnected: return BIOFED_ERR_CONNECTION;
    case ErrorCode::kRoundFailed: return BIOFED_ERR_ROUND_FAILED;
    case ErrorCode::kNonFinite: return BIOFED_ERR_NUMERIC;
    case ErrorCode::kNotClose: return BIOFED_ERR_NOT_CLOSE;
  }
  return BIOFED_ERR_INTERNAL;
}

biofed_status fail(biofed_status status, const std::string& code, const std::string& message) {
  g_last_code = code;
  g_last_error = message;
  return status;
}

template <class F>
biofed_status guarded(F&& body) {
  try {
    body();
    return BIOFED_OK;
  } catch (const Error& e) {
    return fail(status_for(e.code()), biofed::error_code_name(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BIOFED_ERR_INTERNAL, "out-of-memory", "out of memory");
  } catch (const std::exception& e) {
    return fail(BIOFED_ERR_INTERNAL, "internal", e.what());
  } catch (...) {
    return fail(BIOFED_ERR_INTERNAL, "internal", "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

void fill(const biofed::app::RunSummary& s, biofed_run_summary* out) {
  if (!out) return;
  out->rounds = static_cast<uint32_t>(s.rounds);
  out->federated_accuracy = s.federated_accuracy.value_or(-1.0);
  out->centralized_accuracy = s.centralized_accuracy.value_or(-1.0);
  out->close = s.comparison ? (s.comparison->close ? 1 : 0) : -1;
  out->accuracy_delta = 0.0;
  if (s.comparison) {
    for (const auto& d : s.comparison->deltas) {
      if (d.name == "accuracy") out->accuracy_delta = d.delta;
    }
  }
  out->twin_records = s.twin_records;
  out->frames_audited = s.frames_audited;
}

}  // namespace

extern "C" {

const char* biofed_version(void) { return "0.1.0"; }

const char* biofed_status_name(biofed_status status) {
  switch (status) {
    case BIOFED_OK: return "ok";
    case BIOFED_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case BIOFED_ERR_VALIDATION: return "validation";
    case BIOFED_ERR_ALREADY_EXISTS: return "already-exists";
    case BIOFED_ERR_MISSING_FILE: return "missing-file";
    case BIOFED_ERR_DATA: return "data";
    case BIOFED_ERR_IO: return "io";
    case BIOFED_ERR_PROTOCOL: return "protocol";
    case BIOFED_ERR_VERSION_MISMATCH: return "version-mismatch";
    case BIOFED_ERR_TIMEOUT: return "timeout";
    case BIOFED_ERR_CONNECTION: return "connection";
    case BIOFED_ERR_ROUND_FAILED: return "round-failed";
    case BIOFED_ERR_NUMERIC: return "numeric";
    case BIOFED_ERR_NOT_CLOSE: return "not-close";
    case BIOFED_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* biofed_last_error(void) { return g_last_error.c_str(); }
const char* biofed_last_error_code(void) { return g_last_code.c_str(); }
void biofed_string_free(char* s) { std::free(s); }

biofed_status biofed_config_default(biofed_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new biofed_config{biofed::app::default_config()};
  });
}

biofed_status biofed_config_load(const char* path, biofed_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new biofed_config{biofed::app::load_config(path)};
  });
}

biofed_status biofed_config_from_json(const char* json, biofed_config** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kValidation, e.what());
    }
    *out = new biofed_config{biofed::app::config_from_json(doc)};
  });
}

biofed_status biofed_config_patch(biofed_config* cfg, const char* json_patch) {
  return guarded([&] {
    require(cfg, "cfg");
    require(json_patch, "json_patch");
    nlohmann::json patch;
    try {
      patch = nlohmann::json::parse(json_patch);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kValidation, e.what());
    }
    cfg->cfg = biofed::app::apply_patch(cfg->cfg, patch);
  });
}

biofed_status biofed_config_to_json(const biofed_config* cfg, char** out_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_json, "out_json");
    *out_json = dup_string(biofed::app::config_to_json(cfg->cfg).dump(2) + "\n");
  });
}

void biofed_config_free(biofed_config* cfg) { delete cfg; }

biofed_status biofed_simulate(const biofed_config* cfg, const char* out_dir, int force, biofed_run_summary* summary) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    fill(biofed::app::simulate(cfg->cfg, out_dir, force != 0), summary);
  });
}

biofed_status biofed_centralized(const biofed_config* cfg, const char* out_dir, int force,
                                 biofed_run_summary* summary) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    fill(biofed::app::centralized(cfg->cfg, out_dir, force != 0), summary);
  });
}

biofed_status biofed_serve(const biofed_config* cfg, const char* out_dir, int force, biofed_run_summary* summary) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    fill(biofed::app::serve(cfg->cfg, out_dir, force != 0), summary);
  });
}

biofed_status biofed_partition(const biofed_config* cfg, const char* out_dir, int force, char** out_paths) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    const auto paths = biofed::app::write_shards(cfg->cfg, out_dir, force != 0);
    if (out_paths) {
      std::string joined;
      for (const auto& p : paths) joined += p.string() + "\n";
      *out_paths = dup_string(joined);
    }
  });
}

biofed_status biofed_client(const char* shard_file, const char* host, uint16_t port, uint16_t protocol_version,
                            uint32_t connect_timeout_ms) {
  return guarded([&] {
    require(shard_file, "shard_file");
    biofed::app::ClientOverrides o;
    if (host) o.host = host;
    if (port) o.port = port;
    if (protocol_version) o.protocol_version = protocol_version;
    if (connect_timeout_ms) o.connect_timeout_ms = connect_timeout_ms;
    biofed::app::run_site(shard_file, o);
  });
}

biofed_status biofed_report(const char* run_dir, double accuracy_threshold, int force, char** out_text,
                            int* close) {
  return guarded([&] {
    require(run_dir, "run_dir");
    const auto r = biofed::app::report(run_dir, accuracy_threshold, force != 0);
    if (close) *close = r.comparison ? (r.comparison->close ? 1 : 0) : -1;
    if (out_text) *out_text = dup_string(r.text);
  });
}

biofed_status biofed_twin_store_open(const char* run_dir, biofed_twin_store** out) {
  return guarded([&] {
    require(run_dir, "run_dir");
    require(out, "out");
    const std::filesystem::path dir(run_dir);
    const nlohmann::json info = biofed::app::read_json(dir / "dataset.json");
    std::vector<std::string> classes, sites;
    try {
      classes = info.at("classes").get<std::vector<std::string>>();
      sites = info.at("sites").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kValidation, (dir / "dataset.json").string() + ": " + e.what());
    }
    const auto path = dir / "twins.jsonl";
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::kMissingFile, "no twin store at " + path.string());
    *out = new biofed_twin_store{std::make_unique<biofed::twin::TwinStore>(path, classes, sites)};
  });
}

size_t biofed_twin_store_size(const biofed_twin_store* store) { return store ? store->store->size() : 0; }

biofed_status biofed_twin_query(const biofed_twin_store* store, const char* class_name, const char* site,
                                int64_t round, int as_json, char** out) {
  return guarded([&] {
    require(store, "store");
    require(out, "out");
    biofed::twin::TwinFilter f;
    if (class_name) f.class_name = class_name;
    if (site) f.site = site;
    if (round >= 0) f.round = static_cast<std::uint32_t>(round);
    const auto records = store->store->query(f);
    if (as_json) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : records) arr.push_back(biofed::twin::record_to_json(r));
      *out = dup_string(arr.dump(2) + "\n");
    } else {
      *out = dup_string(biofed::twin::records_table(records));
    }
  });
}

void biofed_twin_store_free(biofed_twin_store* store) { delete store; }

biofed_status biofed_model_load(const char* checkpoint_path, biofed_model** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = new biofed_model{biofed::nn::load_checkpoint(checkpoint_path)};
  });
}

size_t biofed_model_num_values(const biofed_model* model) { return model ? model->params.total_values() : 0; }

biofed_status biofed_model_schema_hash(const biofed_model* model, char** out_hex) {
  return guarded([&] {
    require(model, "model");
    require(out_hex, "out_hex");
    *out_hex = dup_string(biofed::to_hex(model->params.schema_hash()));
  });
}

int biofed_model_equal(const biofed_model* a, const biofed_model* b) {
  if (!a || !b) return 0;
  return a->params == b->params ? 1 : 0;
}

void biofed_model_free(biofed_model* model) { delete model; }

}  // extern "C"
