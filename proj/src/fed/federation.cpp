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

#include "fed/federation.hpp"

#include "common/log.hpp"
#include "nn/checkpoint.hpp"

namespace biofed::fed {

namespace fs = std::filesystem;

DirectoryRecorder::DirectoryRecorder(fs::path dir, bool checkpoint_every_round)
    : dir_(std::move(dir)), every_round_(checkpoint_every_round) {
  std::error_code ec;
  fs::create_directories(dir_ / "checkpoints", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir_ / "checkpoints").string() + ": " + ec.message());
  run_log_.open(dir_ / "run_log.jsonl", std::ios::binary | std::ios::trunc);
  timings_.open(dir_ / "timings.jsonl", std::ios::binary | std::ios::trunc);
  if (!run_log_ || !timings_) throw Error(ErrorCode::kIo, "cannot open run log in " + dir_.string());
}

fs::path DirectoryRecorder::checkpoint_path(std::uint32_t round) const {
  return dir_ / "checkpoints" / ("round-" + std::to_string(round) + ".bfck");
}

void DirectoryRecorder::on_start(const nn::ModelParameters& initial) {
  nn::save_checkpoint(checkpoint_path(0).string(), initial);
}

void DirectoryRecorder::on_round(const RoundReport& report, const nn::ModelParameters& global) {
  if (!every_round_ && last_round_ > 0) fs::remove(checkpoint_path(last_round_));
  nn::save_checkpoint(checkpoint_path(report.round).string(), global);
  last_round_ = report.round;
  run_log_ << report_to_json(report).dump() << '\n';
  run_log_.flush();
  timings_ << nlohmann::json{{"round", report.round}, {"duration_ms", report.duration_ms}}.dump() << '\n';
  timings_.flush();
  if (!run_log_ || !timings_) throw Error(ErrorCode::kIo, "write failed in " + dir_.string());
}

FederationResult run_federation(const FederationConfig& cfg, transport::ServerTransport& transport,
                                const nn::ModelParameters& initial, const Evaluator& evaluator,
                                RunRecorder* recorder) {
  cfg.validate();
  nn::validate_parameters(evaluator.arch(), initial);
  if (recorder) recorder->on_start(initial);

  FederationResult result;
  RoundState state;
  state.round_index = 1;
  state.global_params = initial;
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    if (r > 0) state.open_next_round();
    RoundOutcome outcome = run_round(std::move(state), transport, cfg, evaluator);
    if (outcome.state.status == RoundStatus::kFailed) {
      throw Error(ErrorCode::kRoundFailed,
                  "round " + std::to_string(outcome.report.round) + ": " + outcome.report.failure);
    }
    state = std::move(outcome.state);
    if (recorder) recorder->on_round(outcome.report, state.global_params);
    result.reports.push_back(std::move(outcome.report));
  }
  result.final_params = std::move(state.global_params);
  return result;
}

FederationResult run_centralized(const nn::ModelParameters& initial, const nn::LabeledSamples& train_set,
                                 const nn::TrainConfig& cfg, std::size_t epochs, const Evaluator& evaluator,
                                 RunRecorder* recorder) {
  if (train_set.empty()) throw Error(ErrorCode::kEmptyInput, "centralized training needs a non-empty dataset");
  if (epochs < 1) throw Error(ErrorCode::kValidation, "epochs must be >= 1");
  cfg.validate();
  nn::validate_parameters(evaluator.arch(), initial);
  if (recorder) recorder->on_start(initial);

  nn::TrainConfig one_epoch = cfg;
  one_epoch.local_epochs = 1;
  FederationResult result;
  nn::Model model{evaluator.arch(), initial};
  for (std::size_t e = 0; e < epochs; ++e) {
    const auto started = transport::Clock::now();
    nn::LocalTrainResult trained = nn::train_local(model, train_set, one_epoch, e);
    model.params = std::move(trained.params);

    RoundReport report;
    report.round = static_cast<std::uint32_t>(e + 1);
    report.clients.push_back({kCentralizedClientId, trained.num_examples, trained.final_loss});
    report.mean_train_loss = trained.final_loss;
    const metrics::Evaluation ev = evaluator.evaluate(model.params);
    report.eval_loss = ev.mean_loss;
    report.confusion = ev.confusion;
    report.metrics = metrics::derive_metrics(ev.confusion);
    report.duration_ms = std::chrono::duration<double, std::milli>(transport::Clock::now() - started).count();
    log().info("centralized epoch {}: train loss {:.5f}, accuracy {:.4f}", report.round, report.mean_train_loss,
               report.metrics.accuracy);
    if (recorder) recorder->on_round(report, model.params);
    result.reports.push_back(std::move(report));
  }
  result.final_params = std::move(model.params);
  return result;
}

}  // namespace biofed::fed
