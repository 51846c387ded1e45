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

#include "fed/round.hpp"

#include <algorithm>

#include "common/log.hpp"

namespace biofed::fed {

using transport::Message;

void FederationConfig::validate() const {
  std::string problems;
  auto add = [&](const std::string& msg) { problems += (problems.empty() ? "" : "; ") + msg; };
  if (num_clients < 1) add("num_clients must be >= 1");
  if (rounds < 1) add("rounds must be >= 1");
  if (clients_required < 1) add("clients_required must be >= 1");
  if (clients_required > num_clients) add("clients_required must be <= num_clients");
  if (round_timeout.count() <= 0) add("round_timeout must be positive");
  try {
    train.validate();
  } catch (const Error& e) {
    add(e.what());
  }
  if (!problems.empty()) throw Error(ErrorCode::kValidation, problems);
}

const char* status_name(RoundStatus status) {
  switch (status) {
    case RoundStatus::kDistributing: return "distributing";
    case RoundStatus::kCollecting: return "collecting";
    case RoundStatus::kAggregating: return "aggregating";
    case RoundStatus::kDone: return "done";
    case RoundStatus::kFailed: return "failed";
  }
  return "unknown";
}

bool is_legal_transition(RoundStatus from, RoundStatus to) {
  if (to == RoundStatus::kFailed) return from != RoundStatus::kFailed;
  switch (from) {
    case RoundStatus::kDistributing: return to == RoundStatus::kCollecting;
    case RoundStatus::kCollecting: return to == RoundStatus::kAggregating;
    case RoundStatus::kAggregating: return to == RoundStatus::kDone;
    case RoundStatus::kDone: return to == RoundStatus::kDistributing;
    case RoundStatus::kFailed: return false;
  }
  return false;
}

void RoundState::transition(RoundStatus next) {
  if (!is_legal_transition(status, next)) {
    throw Error(ErrorCode::kProtocol, std::string("illegal round transition ") + status_name(status) + " -> " +
                                          status_name(next));
  }
  status = next;
}

void RoundState::open_next_round() {
  transition(RoundStatus::kDistributing);
  ++round_index;
  pending.clear();
  received.clear();
  failure.clear();
}

nlohmann::json report_to_json(const RoundReport& r) {
  nlohmann::json clients = nlohmann::json::array();
  for (const auto& c : r.clients) {
    clients.push_back({{"client_id", c.client_id}, {"num_examples", c.num_examples}, {"train_loss", c.train_loss}});
  }
  nlohmann::json doc{{"round", r.round},
                     {"clients", clients},
                     {"train_loss", r.mean_train_loss},
                     {"eval_loss", r.eval_loss},
                     {"accuracy", r.metrics.accuracy},
                     {"macro_precision", r.metrics.macro_precision},
                     {"macro_recall", r.metrics.macro_recall},
                     {"macro_f1", r.metrics.macro_f1}};
  if (r.failed) doc["failure"] = r.failure;
  return doc;
}

namespace {

RoundOutcome fail(RoundState state, RoundReport report, const std::string& why) {
  state.transition(RoundStatus::kFailed);
  state.failure = why;
  report.failed = true;
  report.failure = why;
  log().warn("round {} failed: {}", state.round_index, why);
  return {std::move(state), std::move(report)};
}

}  // namespace

RoundOutcome run_round(RoundState state, transport::ServerTransport& transport, const FederationConfig& cfg,
                       const Evaluator& evaluator) {
  const auto started = transport::Clock::now();
  RoundReport report;
  report.round = state.round_index;
  if (state.status != RoundStatus::kDistributing) {
    throw Error(ErrorCode::kProtocol, std::string("run_round needs a distributing state, got ") +
                                          status_name(state.status));
  }
  const std::vector<std::string> selected = transport.clients();
  if (selected.size() < cfg.clients_required) {
    return fail(std::move(state), std::move(report),
                std::to_string(selected.size()) + " clients connected, " + std::to_string(cfg.clients_required) +
                    " required");
  }
  const Digest schema = state.global_params.schema_hash();
  for (const auto& id : selected) {
    transport.send(id, Message{transport::kProtocolVersion, state.round_index,
                               transport::FitInstruction{state.global_params, cfg.train}});
    state.pending.insert(id);
  }
  state.transition(RoundStatus::kCollecting);

  const auto deadline = started + cfg.round_timeout;
  std::vector<std::string> lost;
  while (!state.pending.empty()) {
    std::optional<transport::Inbound> in = transport.receive(deadline);
    if (!in) break;
    if (state.pending.count(in->client_id) == 0) {
      log().debug("ignoring message from {} outside the pending set", in->client_id);
      continue;
    }
    if (!in->message) {
      log().warn("{} dropped out of round {}: {}", in->client_id, state.round_index, in->detail);
      state.pending.erase(in->client_id);
      lost.push_back(in->client_id);
      continue;
    }
    const Message& msg = *in->message;
    if (const auto* err = std::get_if<transport::ErrorMsg>(&msg.body)) {
      log().warn("{} reported an error in round {}: {}", in->client_id, state.round_index, err->text);
      state.pending.erase(in->client_id);
      lost.push_back(in->client_id);
      continue;
    }
    const auto* fit = std::get_if<transport::FitResultMsg>(&msg.body);
    if (!fit || msg.round != state.round_index) {
      log().debug("ignoring {} for round {} from {}", transport::tag_name(msg.tag()), msg.round, in->client_id);
      continue;
    }
    if (fit->client_id != in->client_id) {
      return fail(std::move(state), std::move(report),
                  "session " + in->client_id + " sent a result labelled " + fit->client_id);
    }
    if (fit->params.schema_hash() != schema) {
      return fail(std::move(state), std::move(report), "schema mismatch in result from " + in->client_id);
    }
    if (fit->num_examples == 0) {
      return fail(std::move(state), std::move(report), in->client_id + " reported zero examples");
    }
    state.pending.erase(in->client_id);
    state.received.push_back(FitResult{fit->client_id, msg.round, fit->params, fit->num_examples, fit->train_loss});
  }

  if (state.received.size() < cfg.clients_required) {
    std::string missing;
    for (const auto& id : state.pending) missing += (missing.empty() ? "" : ", ") + id;
    for (const auto& id : lost) missing += (missing.empty() ? "" : ", ") + id;
    return fail(std::move(state), std::move(report),
                "timeout: " + std::to_string(state.received.size()) + " of " + std::to_string(cfg.clients_required) +
                    " required results (missing " + missing + ")");
  }

  state.transition(RoundStatus::kAggregating);
  std::sort(state.received.begin(), state.received.end(),
            [](const FitResult& a, const FitResult& b) { return a.client_id < b.client_id; });
  nn::ModelParameters aggregated = fedavg(state.received);

  double weighted = 0.0;
  std::uint64_t total = 0;
  for (const auto& r : state.received) {
    report.clients.push_back({r.client_id, r.num_examples, r.train_loss});
    weighted += r.train_loss * static_cast<double>(r.num_examples);
    total += r.num_examples;
  }
  report.mean_train_loss = weighted / static_cast<double>(total);
  const metrics::Evaluation ev = evaluator.evaluate(aggregated);
  report.eval_loss = ev.mean_loss;
  report.confusion = ev.confusion;
  report.metrics = metrics::derive_metrics(ev.confusion);

  state.global_params = std::move(aggregated);
  state.transition(RoundStatus::kDone);
  report.duration_ms =
      std::chrono::duration<double, std::milli>(transport::Clock::now() - started).count();
  log().info("round {}: train loss {:.5f}, eval loss {:.5f}, accuracy {:.4f}", report.round, report.mean_train_loss,
             report.eval_loss, report.metrics.accuracy);
  return {std::move(state), std::move(report)};
}

}  // namespace biofed::fed
