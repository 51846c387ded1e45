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

#ifndef BIOFED_APP_CONFIG_HPP_
#define BIOFED_APP_CONFIG_HPP_

#include <cstdint>
#include <string>

#include <json.hpp>

#include "data/partition.hpp"
#include "data/synthetic.hpp"
#include "fed/round.hpp"

namespace biofed::app {

struct DatasetConfig {
  std::string source = "synthetic";  // "synthetic" or "manifest"
  std::string manifest;              // path, for source = manifest
  double test_fraction = 0.2;
  std::size_t num_classes = 5;
  std::size_t samples_per_class = 40;
  nn::Shape image_shape{1, 16, 16};
  double noise = 0.2;
};

// Everything a run needs. Every seed in the pipeline derives from `seed`.
struct RunConfig {
  std::uint64_t seed = 0;
  DatasetConfig dataset;
  data::PartitionStrategy strategy = data::PartitionStrategy::kIid;
  fed::FederationConfig federation;
  bool centralized = true;
  std::size_t centralized_epochs = 0;  // 0: rounds x local epochs
  bool twins = true;
  bool audit = true;
  double accuracy_threshold = 0.05;
  std::string host = "127.0.0.1";
  std::uint16_t port = 47800;
  std::uint32_t accept_timeout_ms = 60000;
  std::size_t max_frame_bytes = 64u << 20;

  // Copies `seed` into the federation and train configs.
  void propagate_seed();
  std::size_t effective_centralized_epochs() const;
};

RunConfig default_config();

nlohmann::json config_to_json(const RunConfig& cfg);

// Merges `doc` over the defaults and validates. Unknown keys, wrong types and
// out-of-range values are all collected and raised together as one
// kValidation error, one "field.path: problem" line each.
RunConfig config_from_json(const nlohmann::json& doc);

RunConfig load_config(const std::string& path);

// Applies an RFC 7396 merge patch and revalidates.
RunConfig apply_patch(const RunConfig& cfg, const nlohmann::json& patch);

data::SyntheticSpec synthetic_spec(const RunConfig& cfg);

}  // namespace biofed::app

#endif  // BIOFED_APP_CONFIG_HPP_
