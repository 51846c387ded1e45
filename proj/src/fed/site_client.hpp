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

#ifndef BIOFED_FED_SITE_CLIENT_HPP_
#define BIOFED_FED_SITE_CLIENT_HPP_

#include <optional>
#include <string>

#include "nn/network.hpp"
#include "nn/train.hpp"
#include "transport/message.hpp"

namespace biofed::fed {

// One participating site. Holds its private shard and answers server
// instructions; only parameters, counts, losses and confusion counts leave.
class SiteClient {
 public:
  SiteClient(std::string client_id, nn::Architecture arch, nn::LabeledSamples shard);

  const std::string& id() const noexcept { return id_; }
  std::size_t num_examples() const noexcept { return shard_.size(); }

  // FitInstruction -> FitResult, EvaluateInstruction -> EvaluateResult,
  // Shutdown -> nothing, anything else -> Error.
  std::optional<transport::Message> handle(const transport::Message& msg);

 private:
  std::string id_;
  nn::Architecture arch_;
  nn::LabeledSamples shard_;
};

// Round r (1-based) with E local epochs trains global epochs
// (r - 1) * E ... r * E - 1.
std::uint64_t first_epoch_of_round(std::uint32_t round, std::uint32_t local_epochs);

}  // namespace biofed::fed

#endif  // BIOFED_FED_SITE_CLIENT_HPP_
