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

#ifndef BIOFED_APP_PIPELINE_HPP_
#define BIOFED_APP_PIPELINE_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"
#include "data/dataset.hpp"
#include "fed/federation.hpp"
#include "metrics/confusion.hpp"

namespace biofed::app {

namespace fs = std::filesystem;

// Creates `dir`. An existing non-empty directory is an kAlreadyExists error
// unless `force`, in which case its contents are removed first.
void prepare_output_dir(const fs::path& dir, bool force);

data::Dataset load_dataset(const RunConfig& cfg);

// classes, sites, image shape, normalization and the test-set hash.
nlohmann::json dataset_info(const data::Dataset& dataset);

void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const fs::path& path);

// metrics/<name>.{json,csv,svg} under `run_dir`.
void write_model_metrics(const fs::path& run_dir, const std::string& name, const fed::RoundReport& final_report,
                         const std::string& test_set_hash, const std::vector<std::string>& class_names);

struct RunSummary {
  std::size_t rounds = 0;
  std::optional<double> federated_accuracy;
  std::optional<double> centralized_accuracy;
  std::optional<metrics::ComparisonReport> comparison;
  std::size_t twin_records = 0;
  std::size_t frames_audited = 0;
};

// Loopback federation plus optional centralized baseline, metrics,
// comparison and twin records, all written under `out`.
RunSummary simulate(const RunConfig& cfg, const fs::path& out, bool force);

// Centralized baseline alone.
RunSummary centralized(const RunConfig& cfg, const fs::path& out, bool force);

// Writes <out>/shards/client-<i>.json, one per client, and returns the paths.
std::vector<fs::path> write_shards(const RunConfig& cfg, const fs::path& out, bool force);

// Socket server: accepts clients, runs the federation and writes the same
// federated artifacts as simulate. The bound port is written to <out>/port
// before accepting so callers can use port 0.
RunSummary serve(const RunConfig& cfg, const fs::path& out, bool force);

struct ClientOverrides {
  std::optional<std::string> host;
  std::optional<std::uint16_t> port;
  std::optional<std::uint16_t> protocol_version;
  std::optional<std::uint32_t> connect_timeout_ms;
};

// Participates in a socket federation using a shard file from write_shards.
void run_site(const fs::path& shard_file, const ClientOverrides& overrides);

struct ReportSummary {
  std::vector<std::string> models;
  std::optional<metrics::ComparisonReport> comparison;
  std::string text;
};

// Renders <run>/report/ from the metrics a finished run left behind: one CSV
// and one SVG per evaluated model, a text summary and, when both models are
// present, comparison.json.
ReportSummary report(const fs::path& run_dir, double accuracy_threshold, bool force);

}  // namespace biofed::app

#endif  // BIOFED_APP_PIPELINE_HPP_
