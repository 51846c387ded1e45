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

#ifndef BIOFED_FED_FEDERATION_HPP_
#define BIOFED_FED_FEDERATION_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fed/round.hpp"

namespace biofed::fed {

// Receives the initial model and every completed round. Implementations must
// not throw for recoverable conditions; a throw aborts the run.
class RunRecorder {
 public:
  virtual ~RunRecorder() = default;
  virtual void on_start(const nn::ModelParameters& initial) = 0;
  virtual void on_round(const RoundReport& report, const nn::ModelParameters& global) = 0;
};

// Writes <dir>/checkpoints/round-<i>.bfck (round-0 is the initial model),
// <dir>/run_log.jsonl and <dir>/timings.jsonl. With checkpoint_every_round
// off only round-0 and the last seen round are kept on disk.
class DirectoryRecorder : public RunRecorder {
 public:
  explicit DirectoryRecorder(std::filesystem::path dir, bool checkpoint_every_round = true);

  void on_start(const nn::ModelParameters& initial) override;
  void on_round(const RoundReport& report, const nn::ModelParameters& global) override;

  std::filesystem::path checkpoint_path(std::uint32_t round) const;

 private:
  std::filesystem::path dir_;
  bool every_round_;
  std::uint32_t last_round_ = 0;
  std::ofstream run_log_;
  std::ofstream timings_;
};

struct FederationResult {
  std::vector<RoundReport> reports;
  nn::ModelParameters final_params;
};

// Runs cfg.rounds rounds over whatever clients the transport has connected.
// The first failed round aborts with kRoundFailed naming its index.
FederationResult run_federation(const FederationConfig& cfg, transport::ServerTransport& transport,
                                const nn::ModelParameters& initial, const Evaluator& evaluator,
                                RunRecorder* recorder = nullptr);

// One model trained on the union of the shards, one report per epoch. Epoch e
// uses the same shuffle stream as global epoch e of a federation, which makes
// a single-client federation reproduce this run exactly.
FederationResult run_centralized(const nn::ModelParameters& initial, const nn::LabeledSamples& train_set,
                                 const nn::TrainConfig& cfg, std::size_t epochs, const Evaluator& evaluator,
                                 RunRecorder* recorder = nullptr);

inline constexpr const char* kCentralizedClientId = "centralized";

}  // namespace biofed::fed

#endif  // BIOFED_FED_FEDERATION_HPP_
