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

#include "fed/site_client.hpp"

#include "common/log.hpp"
#include "metrics/evaluate.hpp"

namespace biofed::fed {

using transport::Message;

SiteClient::SiteClient(std::string client_id, nn::Architecture arch, nn::LabeledSamples shard)
    : id_(std::move(client_id)), arch_(std::move(arch)), shard_(std::move(shard)) {
  if (shard_.empty()) throw Error(ErrorCode::kEmptyInput, id_ + ": shard is empty");
  if (shard_.sample_shape != arch_.input_shape) {
    throw Error(ErrorCode::kShapeMismatch, id_ + ": shard samples do not match the model input shape");
  }
}

std::uint64_t first_epoch_of_round(std::uint32_t round, std::uint32_t local_epochs) {
  if (round == 0) throw Error(ErrorCode::kInvalidArgument, "training rounds are numbered from 1");
  return std::uint64_t{round - 1} * local_epochs;
}

std::optional<Message> SiteClient::handle(const Message& msg) {
  try {
    if (const auto* fit = std::get_if<transport::FitInstruction>(&msg.body)) {
      nn::validate_parameters(arch_, fit->params);
      const nn::LocalTrainResult r = nn::train_local(nn::Model{arch_, fit->params}, shard_, fit->config,
                                                     first_epoch_of_round(msg.round, fit->config.local_epochs));
      log().debug("{} round {}: loss {:.5f}", id_, msg.round, r.final_loss);
      return Message{transport::kProtocolVersion, msg.round,
                     transport::FitResultMsg{id_, r.params, r.num_examples, r.final_loss}};
    }
    if (const auto* ev = std::get_if<transport::EvaluateInstruction>(&msg.body)) {
      nn::validate_parameters(arch_, ev->params);
      const metrics::Evaluation e = metrics::evaluate_model(nn::Model{arch_, ev->params}, shard_);
      return Message{transport::kProtocolVersion, msg.round, transport::EvaluateResultMsg{id_, e.mean_loss, e.confusion}};
    }
    if (std::holds_alternative<transport::Shutdown>(msg.body)) return std::nullopt;
    throw Error(ErrorCode::kProtocol, std::string("client cannot handle ") + transport::tag_name(msg.tag()));
  } catch (const Error& e) {
    return Message{transport::kProtocolVersion, msg.round,
                   transport::ErrorMsg{static_cast<std::uint16_t>(e.code()), e.what()}};
  }
}

}  // namespace biofed::fed
