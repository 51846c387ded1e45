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

#ifndef BIOFED_TWIN_REGISTRY_HPP_
#define BIOFED_TWIN_REGISTRY_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "data/dataset.hpp"
#include "metrics/confusion.hpp"
#include "nn/network.hpp"

namespace biofed::twin {

struct ModelVersion {
  std::uint32_t round = 0;
  std::string schema_hash;  // hex
  std::string checkpoint;   // persisted parameters; relative to the store file

  friend bool operator==(const ModelVersion&, const ModelVersion&) = default;
};

struct TwinRecord {
  std::uint64_t record_id = 0;
  std::string sample_ref;
  std::uint32_t predicted_index = 0;
  std::string predicted_class;
  std::vector<double> probabilities;
  std::string site;
  // Ground truth when the sample came from a labelled manifest.
  std::optional<std::uint32_t> true_index;
  ModelVersion version;
  std::string timestamp;  // ISO-8601 UTC

  friend bool operator==(const TwinRecord&, const TwinRecord&) = default;
};

nlohmann::json record_to_json(const TwinRecord& record);
TwinRecord record_from_json(const nlohmann::json& doc);

struct TwinFilter {
  std::optional<std::string> class_name;
  std::optional<std::string> site;
  std::optional<std::uint32_t> round;
  std::optional<std::string> schema_hash;
};

using TimestampFn = std::function<std::string()>;
std::string utc_now();

// Append-only store backed by a JSON-lines file, with in-memory indexes by
// class and by site that are rebuilt on open. An empty path keeps the store
// in memory only. Single writer.
class TwinStore {
 public:
  TwinStore(std::filesystem::path path, std::vector<std::string> classes, std::vector<std::string> sites,
            TimestampFn clock = utc_now);

  // Validates, assigns the next record id and timestamp, persists, and
  // returns the stored record. Rejects a second record for the same sample
  // under the same model version with kDuplicate.
  const TwinRecord& append(TwinRecord record);

  // Matching records in insertion order; kUnknownFilter for a class or site
  // outside the store's vocabulary.
  std::vector<TwinRecord> query(const TwinFilter& filter) const;

  const std::vector<TwinRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<std::string>& sites() const noexcept { return sites_; }
  const std::filesystem::path& path() const noexcept { return path_; }
  // Relative checkpoint paths are taken relative to the store file.
  std::filesystem::path resolve_checkpoint(const std::string& checkpoint) const;

 private:
  void validate(const TwinRecord& record) const;
  void index(std::size_t position);

  std::filesystem::path path_;
  std::vector<std::string> classes_;
  std::vector<std::string> sites_;
  TimestampFn clock_;
  std::vector<TwinRecord> records_;
  std::map<std::string, std::vector<std::size_t>> by_class_;
  std::map<std::string, std::vector<std::size_t>> by_site_;
  std::map<std::tuple<std::string, std::uint32_t, std::string>, std::uint64_t> seen_;
};

// Runs inference on the given manifest samples and appends one record each.
// The checkpoint named by `version` must exist.
std::vector<TwinRecord> register_samples(TwinStore& store, const nn::Model& model, const ModelVersion& version,
                                         const data::Dataset& dataset, std::span<const std::size_t> indices);

// Confusion matrix rebuilt from the labelled records of one model version.
metrics::ConfusionMatrix retally(const std::vector<TwinRecord>& records, std::size_t num_classes);

// Aligned text table, one record per line.
std::string records_table(const std::vector<TwinRecord>& records);

}  // namespace biofed::twin

#endif  // BIOFED_TWIN_REGISTRY_HPP_
