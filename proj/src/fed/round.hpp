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

#ifndef BIOFED_FED_ROUND_HPP_
#define BIOFED_FED_ROUND_HPP_

#include <chrono>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fed/fedavg.hpp"
#include "metrics/confusion.hpp"
#include "metrics/evaluate.hpp"
#include "nn/network.hpp"
#include "nn/train.hpp"
#include "transport/transport.hpp"

namespace biofed::fed {

struct FederationConfig {
  std::size_t num_clients = 3;
  std::size_t rounds = 10;
  std::size_t clients_required = 3;
  std::chrono::milliseconds round_timeout{60000};
  nn::TrainConfig train;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class RoundStatus { kDistributing, kCollecting, kAggregating, kDone, kFailed };

const char* status_name(RoundStatus status);

// distributing -> collecting -> aggregating -> done, any -> failed, and
// done -> distributing to open the next round.
bool is_legal_transition(RoundStatus from, RoundStatus to);

struct RoundState {
  std::uint32_t round_index = 1;
  nn::ModelParameters global_params;
  std::set<std::string> pending;
  std::vector<FitResult> received;
  RoundStatus status = RoundStatus::kDistributing;
  std::string failure;

  // Throws kProtocol on an illegal transition.
  void transition(RoundStatus next);
  // From done: clears per-round bookkeeping and returns to distributing.
  void open_next_round();
};

struct ClientStat {
  std::string client_id;
  std::uint64_t num_examples = 0;
  double train_loss = 0.0;
};

struct RoundReport {
  std::uint32_t round = 0;
  std::vector<ClientStat> clients;  // sorted by client id
  double mean_train_loss = 0.0;     // example-weighted
  double eval_loss = 0.0;
  metrics::ConfusionMatrix confusion;
  metrics::MetricsReport metrics;
  double duration_ms = 0.0;
  bool failed = false;
  std::string failure;
};

// Run-log object for one round; duration is deliberately absent so logs of
// equal runs compare byte for byte.
nlohmann::json report_to_json(const RoundReport& report);

// Server-side held-out evaluation.
class Evaluator {
 public:
  Evaluator(nn::Architecture arch, nn::LabeledSamples test_set)
      : arch_(std::move(arch)), test_set_(std::move(test_set)) {}

  metrics::Evaluation evaluate(const nn::ModelParameters& params) const {
    return metrics::evaluate_model(nn::Model{arch_, params}, test_set_);
  }
  const nn::Architecture& arch() const noexcept { return arch_; }
  const nn::LabeledSamples& test_set() const noexcept { return test_set_; }

 private:
  nn::Architecture arch_;
  nn::LabeledSamples test_set_;
};

struct RoundOutcome {
  RoundState state;
  RoundReport report;
};

// Sends the global model to every connected client, waits at the barrier
// until all of them answer or the round timeout passes, then aggregates with
// fedavg and evaluates. Fewer than clients_required results, or any schema
// mismatch, leaves the state failed with the global model untouched. On
// success the returned state is done and holds the new global model.
RoundOutcome run_round(RoundState state, transport::ServerTransport& transport, const FederationConfig& cfg,
                       const Evaluator& evaluator);

}  // namespace biofed::fed

#endif  // BIOFED_FED_ROUND_HPP_
