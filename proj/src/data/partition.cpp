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

#include "data/partition.hpp"

#include <algorithm>

#include "common/rng.hpp"

namespace biofed::data {

PartitionStrategy parse_strategy(std::string_view text) {
  if (text == "iid") return PartitionStrategy::kIid;
  if (text == "label-skew") return PartitionStrategy::kLabelSkew;
  throw Error(ErrorCode::kValidation, "unknown partition strategy '" + std::string(text) + "' (iid, label-skew)");
}

const char* strategy_name(PartitionStrategy strategy) {
  return strategy == PartitionStrategy::kIid ? "iid" : "label-skew";
}

std::string client_id(std::size_t index) { return "client-" + std::to_string(index); }

std::vector<ShardSpec> partition(const DatasetManifest& manifest, std::size_t num_clients,
                                 PartitionStrategy strategy, std::uint64_t seed) {
  if (num_clients == 0) throw Error(ErrorCode::kValidation, "num_clients must be >= 1");
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (manifest.samples[i].split == Split::kTrain) train.push_back(i);
  }
  if (train.size() < num_clients) {
    throw Error(ErrorCode::kTooFewSamples, std::to_string(train.size()) + " train samples cannot cover " +
                                               std::to_string(num_clients) + " clients");
  }
  std::vector<ShardSpec> shards(num_clients);
  for (std::size_t c = 0; c < num_clients; ++c) shards[c].client_id = client_id(c);

  if (strategy == PartitionStrategy::kIid) {
    Rng rng(derive_seed(seed, "partition"));
    for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[rng.below(i)]);
    for (std::size_t i = 0; i < train.size(); ++i) shards[i % num_clients].indices.push_back(train[i]);
  } else {
    for (std::size_t i : train) shards[manifest.samples[i].label % num_clients].indices.push_back(i);
  }
  for (auto& s : shards) {
    if (s.indices.empty()) {
      throw Error(ErrorCode::kTooFewSamples, s.client_id + " would receive no samples under " +
                                                 strategy_name(strategy) + " partitioning");
    }
    std::sort(s.indices.begin(), s.indices.end());
  }
  return shards;
}

Shard materialize(const Dataset& dataset, const ShardSpec& spec) {
  for (std::size_t i : spec.indices) {
    if (i >= dataset.manifest.samples.size() || dataset.manifest.samples[i].split != Split::kTrain) {
      throw Error(ErrorCode::kValidation, spec.client_id + ": shard index " + std::to_string(i) +
                                              " is not a train sample");
    }
  }
  return Shard{spec.client_id, spec.indices, dataset.gather(spec.indices)};
}

}  // namespace biofed::data
