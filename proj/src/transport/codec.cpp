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

#include "transport/message.hpp"

#include <cmath>
#include <limits>

#include "nn/checkpoint.hpp"

namespace biofed::transport {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr std::size_t kMaxConfusionClasses = 4096;

void put_params(ByteWriter& w, const nn::ModelParameters& params) {
  const std::size_t len_at = w.size();
  w.u32(0);
  nn::encode_checkpoint(params, w);
  const std::size_t n = w.size() - len_at - 4;
  if (n > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorCode::kOversizeFrame, "model too large");
  for (int i = 0; i < 4; ++i) w.bytes()[len_at + i] = static_cast<std::uint8_t>(n >> (8 * i));
}

nn::ModelParameters get_params(ByteReader& r) {
  const std::uint32_t n = r.u32();
  ByteSpan blob = r.raw(n);
  return nn::decode_checkpoint(blob);
}

double get_finite(ByteReader& r, const char* what) {
  const double v = r.f64();
  if (!std::isfinite(v)) throw Error(ErrorCode::kMalformedPayload, std::string("non-finite ") + what);
  return v;
}

void put_body(ByteWriter& w, const MessageBody& body) {
  std::visit(Overloaded{
                 [&](const Join& m) { w.str16(m.client_id); },
                 [&](const JoinAck& m) { w.str16(m.client_id); },
                 [&](const FitInstruction& m) {
                   put_params(w, m.params);
                   w.f64(m.config.learning_rate);
                   w.u32(m.config.batch_size);
                   w.u32(m.config.local_epochs);
                   w.u64(m.config.seed);
                 },
                 [&](const FitResultMsg& m) {
                   w.str16(m.client_id);
                   put_params(w, m.params);
                   w.u64(m.num_examples);
                   w.f64(m.train_loss);
                 },
                 [&](const EvaluateInstruction& m) { put_params(w, m.params); },
                 [&](const EvaluateResultMsg& m) {
                   w.str16(m.client_id);
                   w.f64(m.loss);
                   w.u32(static_cast<std::uint32_t>(m.confusion.num_classes()));
                   for (std::uint64_t v : m.confusion.counts()) w.u64(v);
                 },
                 [&](const Shutdown&) {},
                 [&](const ErrorMsg& m) {
                   w.u16(m.code);
                   w.str16(m.text);
                 },
             },
             body);
}

MessageBody get_body(MessageTag tag, ByteReader& r) {
  switch (tag) {
    case MessageTag::kJoin: return Join{r.str16()};
    case MessageTag::kJoinAck: return JoinAck{r.str16()};
    case MessageTag::kFitInstruction: {
      FitInstruction m;
      m.params = get_params(r);
      m.config.learning_rate = get_finite(r, "learning rate");
      m.config.batch_size = r.u32();
      m.config.local_epochs = r.u32();
      m.config.seed = r.u64();
      return m;
    }
    case MessageTag::kFitResult: {
      FitResultMsg m;
      m.client_id = r.str16();
      m.params = get_params(r);
      m.num_examples = r.u64();
      m.train_loss = get_finite(r, "train loss");
      return m;
    }
    case MessageTag::kEvaluateInstruction: return EvaluateInstruction{get_params(r)};
    case MessageTag::kEvaluateResult: {
      EvaluateResultMsg m;
      m.client_id = r.str16();
      m.loss = get_finite(r, "loss");
      const std::uint32_t k = r.u32();
      if (k > kMaxConfusionClasses || std::uint64_t{k} * k * 8 > r.remaining()) {
        throw Error(ErrorCode::kLengthMismatch, "confusion matrix larger than frame body");
      }
      std::vector<std::uint64_t> counts(std::size_t{k} * k);
      for (auto& c : counts) c = r.u64();
      m.confusion = metrics::ConfusionMatrix(k, std::move(counts));
      return m;
    }
    case MessageTag::kShutdown: return Shutdown{};
    case MessageTag::kError: {
      ErrorMsg m;
      m.code = r.u16();
      m.text = r.str16();
      return m;
    }
  }
  throw Error(ErrorCode::kUnknownTag, "unhandled tag");
}

bool known_tag(std::uint8_t tag) {
  return tag >= static_cast<std::uint8_t>(MessageTag::kJoin) && tag <= static_cast<std::uint8_t>(MessageTag::kError);
}

}  // namespace

MessageTag Message::tag() const { return static_cast<MessageTag>(body.index() + 1); }

const char* tag_name(MessageTag tag) {
  switch (tag) {
    case MessageTag::kJoin: return "Join";
    case MessageTag::kJoinAck: return "JoinAck";
    case MessageTag::kFitInstruction: return "FitInstruction";
    case MessageTag::kFitResult: return "FitResult";
    case MessageTag::kEvaluateInstruction: return "EvaluateInstruction";
    case MessageTag::kEvaluateResult: return "EvaluateResult";
    case MessageTag::kShutdown: return "Shutdown";
    case MessageTag::kError: return "Error";
  }
  return "Unknown";
}

std::span<const VariantInventory> message_inventory() {
  using F = FieldKind;
  static constexpr VariantInventory kInventory[] = {
      {MessageTag::kJoin, {F::kClientId}, 1},
      {MessageTag::kJoinAck, {F::kClientId}, 1},
      {MessageTag::kFitInstruction, {F::kModelParameters, F::kTrainConfig}, 2},
      {MessageTag::kFitResult, {F::kClientId, F::kModelParameters, F::kExampleCount, F::kLoss}, 4},
      {MessageTag::kEvaluateInstruction, {F::kModelParameters}, 1},
      {MessageTag::kEvaluateResult, {F::kClientId, F::kLoss, F::kConfusionCounts}, 3},
      {MessageTag::kShutdown, {}, 0},
      {MessageTag::kError, {F::kErrorCode, F::kErrorText}, 2},
  };
  static_assert(std::size(kInventory) == std::variant_size_v<MessageBody>);
  return kInventory;
}

Bytes encode(const Message& msg, std::size_t max_frame_bytes) {
  ByteWriter w;
  w.u32(0);
  w.u8(static_cast<std::uint8_t>(msg.tag()));
  w.u16(msg.version);
  w.u32(msg.round);
  put_body(w, msg.body);
  Bytes frame = w.take();
  const std::size_t body = frame.size() - kFrameHeaderBytes;
  if (frame.size() > max_frame_bytes || body > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kOversizeFrame, "frame of " + std::to_string(frame.size()) + " bytes exceeds limit of " +
                                               std::to_string(max_frame_bytes));
  }
  for (int i = 0; i < 4; ++i) frame[i] = static_cast<std::uint8_t>(body >> (8 * i));
  return frame;
}

FrameHeader parse_header(ByteSpan header, std::size_t max_frame_bytes) {
  ByteReader r(header, ErrorCode::kTruncatedFrame);
  FrameHeader h;
  h.body_length = r.u32();
  if (std::size_t{h.body_length} + kFrameHeaderBytes > max_frame_bytes) {
    throw Error(ErrorCode::kOversizeFrame, "declared body of " + std::to_string(h.body_length) + " bytes");
  }
  h.tag = r.u8();
  h.version = r.u16();
  h.round = r.u32();
  return h;
}

Message decode(ByteSpan frame, std::uint16_t expected_version, std::size_t max_frame_bytes) {
  const FrameHeader h = parse_header(frame, max_frame_bytes);
  const std::size_t want = kFrameHeaderBytes + h.body_length;
  if (frame.size() < want) {
    throw Error(ErrorCode::kTruncatedFrame, "frame has " + std::to_string(frame.size()) + " of " +
                                                std::to_string(want) + " bytes");
  }
  if (frame.size() > want) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(frame.size() - want) + " bytes beyond declared length");
  }
  if (!known_tag(h.tag)) throw Error(ErrorCode::kUnknownTag, "tag " + std::to_string(h.tag));
  if (h.version != expected_version) {
    throw Error(ErrorCode::kVersionMismatch, "peer speaks version " + std::to_string(h.version) + ", expected " +
                                                 std::to_string(expected_version));
  }
  ByteReader body(frame.subspan(kFrameHeaderBytes), ErrorCode::kLengthMismatch);
  Message msg;
  msg.version = h.version;
  msg.round = h.round;
  msg.body = get_body(static_cast<MessageTag>(h.tag), body);
  if (!body.done()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(body.remaining()) + " unread body bytes");
  }
  return msg;
}

}  // namespace biofed::transport
