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

#ifndef BIOFED_TRANSPORT_MESSAGE_HPP_
#define BIOFED_TRANSPORT_MESSAGE_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "common/bytes.hpp"
#include "metrics/confusion.hpp"
#include "nn/params.hpp"
#include "nn/train.hpp"

namespace biofed::transport {

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::size_t kDefaultMaxFrameBytes = std::size_t{64} << 20;
// u32 body length | u8 tag | u16 protocol version | u32 round index
inline constexpr std::size_t kFrameHeaderBytes = 11;

enum class MessageTag : std::uint8_t {
  kJoin = 1,
  kJoinAck = 2,
  kFitInstruction = 3,
  kFitResult = 4,
  kEvaluateInstruction = 5,
  kEvaluateResult = 6,
  kShutdown = 7,
  kError = 8,
};

struct Join {
  std::string client_id;
  friend bool operator==(const Join&, const Join&) = default;
};

struct JoinAck {
  std::string client_id;
  friend bool operator==(const JoinAck&, const JoinAck&) = default;
};

struct FitInstruction {
  nn::ModelParameters params;
  nn::TrainConfig config;
  friend bool operator==(const FitInstruction&, const FitInstruction&) = default;
};

struct FitResultMsg {
  std::string client_id;
  nn::ModelParameters params;
  std::uint64_t num_examples = 0;
  double train_loss = 0.0;
  friend bool operator==(const FitResultMsg&, const FitResultMsg&) = default;
};

struct EvaluateInstruction {
  nn::ModelParameters params;
  friend bool operator==(const EvaluateInstruction&, const EvaluateInstruction&) = default;
};

struct EvaluateResultMsg {
  std::string client_id;
  double loss = 0.0;
  metrics::ConfusionMatrix confusion;
  friend bool operator==(const EvaluateResultMsg&, const EvaluateResultMsg&) = default;
};

struct Shutdown {
  friend bool operator==(const Shutdown&, const Shutdown&) = default;
};

struct ErrorMsg {
  std::uint16_t code = 0;  // static_cast of biofed::ErrorCode
  std::string text;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using MessageBody = std::variant<Join, JoinAck, FitInstruction, FitResultMsg, EvaluateInstruction,
                                 EvaluateResultMsg, Shutdown, ErrorMsg>;

struct Message {
  std::uint16_t version = kProtocolVersion;
  std::uint32_t round = 0;
  MessageBody body;

  MessageTag tag() const;
  friend bool operator==(const Message&, const Message&) = default;
};

const char* tag_name(MessageTag tag);

// What each variant is allowed to carry. No field kind describes sample
// pixels, labels or image bytes, so no variant can transport raw data.
enum class FieldKind : std::uint8_t {
  kClientId,
  kModelParameters,
  kTrainConfig,
  kExampleCount,
  kLoss,
  kConfusionCounts,
  kErrorCode,
  kErrorText,
};

struct VariantInventory {
  MessageTag tag;
  std::array<FieldKind, 4> fields;
  std::size_t count;
};

std::span<const VariantInventory> message_inventory();

// Frame layout (little-endian):
//   u32 body length | u8 tag | u16 version | u32 round | body
// Body per tag:
//   Join, JoinAck:        str16 client id
//   FitInstruction:       u32 n + n checkpoint bytes | f64 lr | u32 batch | u32 epochs | u64 seed
//   FitResult:            str16 client id | u32 n + n checkpoint bytes | u64 examples | f64 loss
//   EvaluateInstruction:  u32 n + n checkpoint bytes
//   EvaluateResult:       str16 client id | f64 loss | u32 K | K*K u64 counts
//   Shutdown:             (empty)
//   Error:                u16 code | str16 text
Bytes encode(const Message& msg, std::size_t max_frame_bytes = kDefaultMaxFrameBytes);

// Total: every input either yields a Message or throws biofed::Error with one
// of kTruncatedFrame, kUnknownTag, kVersionMismatch, kLengthMismatch,
// kMalformedPayload or kOversizeFrame.
Message decode(ByteSpan frame, std::uint16_t expected_version = kProtocolVersion,
               std::size_t max_frame_bytes = kDefaultMaxFrameBytes);

struct FrameHeader {
  std::uint32_t body_length = 0;
  std::uint8_t tag = 0;
  std::uint16_t version = 0;
  std::uint32_t round = 0;
};

// Parses the fixed header only (stream readers use it to size the body read).
FrameHeader parse_header(ByteSpan header, std::size_t max_frame_bytes = kDefaultMaxFrameBytes);

}  // namespace biofed::transport

#endif  // BIOFED_TRANSPORT_MESSAGE_HPP_
