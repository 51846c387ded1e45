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

#include <gtest/gtest.h>

#include "common/rng.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"
#include "transport/message.hpp"

namespace biofed::transport {
namespace {

using biofed::testing::random_params;

std::string random_id(Rng& rng) {
  std::string s = "client-";
  const std::size_t n = rng.below(12);
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng.below(26)));
  return s;
}

Message random_message(Rng& rng) {
  Message m;
  m.round = static_cast<std::uint32_t>(rng.next_u64());
  switch (rng.below(8)) {
    case 0: m.body = Join{random_id(rng)}; break;
    case 1: m.body = JoinAck{random_id(rng)}; break;
    case 2: {
      FitInstruction f;
      f.params = random_params(rng, rng.below(4));
      f.config = {rng.uniform(1e-4, 1.0), static_cast<std::uint32_t>(1 + rng.below(64)),
                  static_cast<std::uint32_t>(1 + rng.below(5)), rng.next_u64()};
      m.body = f;
      break;
    }
    case 3:
      m.body = FitResultMsg{random_id(rng), random_params(rng, rng.below(4)), rng.next_u64(), rng.uniform(0, 10)};
      break;
    case 4: m.body = EvaluateInstruction{random_params(rng, rng.below(4))}; break;
    case 5: {
      const std::size_t k = rng.below(6);
      std::vector<std::uint64_t> counts(k * k);
      for (auto& c : counts) c = rng.below(1000);
      m.body = EvaluateResultMsg{random_id(rng), rng.uniform(0, 5), metrics::ConfusionMatrix(k, counts)};
      break;
    }
    case 6: m.body = Shutdown{}; break;
    default: m.body = ErrorMsg{static_cast<std::uint16_t>(rng.below(30)), random_id(rng)}; break;
  }
  return m;
}

TEST(CodecTest, ShutdownFrameIsHeaderOnly) {
  const Bytes frame = encode(Message{kProtocolVersion, 3, Shutdown{}});
  EXPECT_EQ(frame, (Bytes{0, 0, 0, 0, 7, 1, 0, 3, 0, 0, 0}));
}

TEST(CodecTest, FitInstructionByteLayout) {
  nn::ModelParameters p;
  p.add("w", nn::Tensor({3}, {1.0f, -2.0f, 0.5f}));
  const Message m{kProtocolVersion, 2, FitInstruction{p, {0.25, 16, 2, 0x0102030405060708ull}}};
  const Bytes frame = encode(m);
  ASSERT_EQ(frame.size(), biofed::testing::fit_instruction_frame_size(1, 1, 3));
  ASSERT_EQ(frame.size(), 69u);
  const Bytes expected{
      58, 0, 0, 0, 3, 1, 0, 2, 0, 0, 0,                  // header: body length, tag, version, round
      30, 0, 0, 0,                                       // checkpoint length
      'B', 'F', 'C', 'K', 1, 0, 1, 0, 0, 0,              // magic, version, entry count
      1, 0, 'w', 1, 3, 0, 0, 0,                          // name, rank, dims
      0x00, 0x00, 0x80, 0x3f,                            // 1.0f
      0x00, 0x00, 0x00, 0xc0,                            // -2.0f
      0x00, 0x00, 0x00, 0x3f,                            // 0.5f
      0, 0, 0, 0, 0, 0, 0xd0, 0x3f,                      // lr 0.25
      16, 0, 0, 0, 2, 0, 0, 0,                           // batch, epochs
      8, 7, 6, 5, 4, 3, 2, 1};                           // seed
  EXPECT_EQ(frame, expected);
  EXPECT_EQ(decode(frame), m);
}

TEST(CodecTest, FrameSizeMatchesOracleForRandomShapes) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const std::size_t name_len = 1 + rng.below(20), rank = 1 + rng.below(4);
    nn::Shape shape;
    for (std::size_t d = 0; d < rank; ++d) shape.push_back(1 + rng.below(5));
    nn::ModelParameters p;
    p.add(std::string(name_len, 'x'), nn::Tensor(shape));
    const Bytes frame = encode(Message{kProtocolVersion, 1, FitInstruction{p, {}}});
    EXPECT_EQ(frame.size(), biofed::testing::fit_instruction_frame_size(name_len, rank, nn::shape_size(shape)));
  }
}

TEST(CodecProperty, RandomRoundTrip) {
  Rng rng(77);
  for (int i = 0; i < 3000; ++i) {
    const Message m = random_message(rng);
    const Bytes frame = encode(m);
    ASSERT_EQ(frame.size(), kFrameHeaderBytes + (frame[0] | frame[1] << 8 | frame[2] << 16 | frame[3] << 24));
    ASSERT_EQ(frame[4], static_cast<std::uint8_t>(m.tag()));
    const Message back = decode(frame);
    ASSERT_EQ(back, m) << tag_name(m.tag());
    ASSERT_EQ(encode(back), frame);
  }
}

TEST(CodecTest, ErrorClasses) {
  Rng rng(1);
  nn::ModelParameters p = random_params(rng, 2);
  const Bytes good = encode(Message{kProtocolVersion, 1, FitResultMsg{"client-0", p, 10, 0.5}});

  EXPECT_ERROR_CODE(decode(ByteSpan(good).first(5)), ErrorCode::kTruncatedFrame);
  EXPECT_ERROR_CODE(decode(ByteSpan(good).first(good.size() - 1)), ErrorCode::kTruncatedFrame);

  Bytes tag = good;
  tag[4] = 0xFF;
  EXPECT_ERROR_CODE(decode(tag), ErrorCode::kUnknownTag);
  tag[4] = 0;
  EXPECT_ERROR_CODE(decode(tag), ErrorCode::kUnknownTag);

  Bytes version = good;
  version[5] = 2;
  EXPECT_ERROR_CODE(decode(version), ErrorCode::kVersionMismatch);
  EXPECT_EQ(decode(version, 2).version, 2);

  Bytes trailing = good;
  trailing.push_back(0);
  EXPECT_ERROR_CODE(decode(trailing), ErrorCode::kLengthMismatch);

  // Declared length covers the extra byte, but the body parser finishes early.
  Bytes padded = trailing;
  padded[0] = static_cast<std::uint8_t>(padded[0] + 1);
  EXPECT_ERROR_CODE(decode(padded), ErrorCode::kLengthMismatch);

  EXPECT_ERROR_CODE(decode(good, kProtocolVersion, good.size() - 1), ErrorCode::kOversizeFrame);
  EXPECT_ERROR_CODE(encode(Message{kProtocolVersion, 1, FitResultMsg{"c", p, 1, 0}}, 20), ErrorCode::kOversizeFrame);
  const Bytes huge{0xff, 0xff, 0xff, 0x7f, 1, 1, 0, 0, 0, 0, 0};
  EXPECT_ERROR_CODE(decode(huge), ErrorCode::kOversizeFrame);

  Bytes nan_loss = encode(Message{kProtocolVersion, 1, FitResultMsg{"c", p, 1, 0.0}});
  for (std::size_t i = nan_loss.size() - 8; i < nan_loss.size(); ++i) nan_loss[i] = 0xff;
  EXPECT_ERROR_CODE(decode(nan_loss), ErrorCode::kMalformedPayload);
}

TEST(CodecFuzz, MutatedFramesFailWithTypedErrors) {
  // Every decode of a damaged frame either succeeds or raises a codec error;
  // nothing else escapes.
  Rng rng(2024);
  std::vector<Bytes> seeds;
  for (int i = 0; i < 64; ++i) seeds.push_back(encode(random_message(rng)));
  std::size_t rejected = 0;
  for (int i = 0; i < 100000; ++i) {
    Bytes f = seeds[rng.below(seeds.size())];
    switch (rng.below(4)) {
      case 0:
        f[rng.below(f.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
        break;
      case 1: f.resize(rng.below(f.size())); break;
      case 2: f.insert(f.begin() + static_cast<long>(rng.below(f.size() + 1)), static_cast<std::uint8_t>(rng.next_u64())); break;
      default:
        for (int k = 0; k < 4; ++k) f[rng.below(f.size())] = static_cast<std::uint8_t>(rng.next_u64());
    }
    try {
      (void)decode(f, kProtocolVersion, 1 << 20);
    } catch (const Error& e) {
      ++rejected;
      switch (e.code()) {
        case ErrorCode::kTruncatedFrame:
        case ErrorCode::kUnknownTag:
        case ErrorCode::kVersionMismatch:
        case ErrorCode::kLengthMismatch:
        case ErrorCode::kMalformedPayload:
        case ErrorCode::kOversizeFrame:
          break;
        default: FAIL() << "unexpected error class: " << e.what();
      }
    }
  }
  EXPECT_GT(rejected, 50000u);
}

TEST(InventoryTest, NoVariantCarriesSampleData) {
  const auto inv = message_inventory();
  ASSERT_EQ(inv.size(), 8u);
  for (std::size_t i = 0; i < inv.size(); ++i) {
    EXPECT_EQ(static_cast<std::size_t>(inv[i].tag), i + 1);
    for (std::size_t f = 0; f < inv[i].count; ++f) {
      // The field kinds enumerate everything that may cross the wire; none of
      // them is an image, a label list or a file reference.
      EXPECT_LE(static_cast<int>(inv[i].fields[f]), static_cast<int>(FieldKind::kErrorText));
    }
  }
}

}  // namespace
}  // namespace biofed::transport
