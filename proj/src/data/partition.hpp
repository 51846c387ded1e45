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

#ifndef BIOFED_DATA_PARTITION_HPP_
#define BIOFED_DATA_PARTITION_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "data/dataset.hpp"

namespace biofed::data {

enum class PartitionStrategy { kIid, kLabelSkew };

PartitionStrategy parse_strategy(std::string_view text);
const char* strategy_name(PartitionStrategy strategy);

// "client-<i>".
std::string client_id(std::size_t index);

struct ShardSpec {
  std::string client_id;
  std::vector<std::size_t> indices;  // manifest sample indices, ascending
};

// iid: the train split is shuffled with a seed-derived Fisher-Yates and dealt
// round-robin, so sizes differ by at most one and the remainder lands on the
// lowest client ids. label-skew: class c goes wholly to client c mod n.
// Only train samples are ever assigned.
std::vector<ShardSpec> partition(const DatasetManifest& manifest, std::size_t num_clients,
                                 PartitionStrategy strategy, std::uint64_t seed);

struct Shard {
  std::string client_id;
  std::vector<std::size_t> indices;
  nn::LabeledSamples data;
};

Shard materialize(const Dataset& dataset, const ShardSpec& spec);

}  // namespace biofed::data

#endif  // BIOFED_DATA_PARTITION_HPP_
