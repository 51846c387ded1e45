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

#include "transport/audit.hpp"

#include <bit>
#include <bitset>
#include <string_view>

namespace biofed::transport {

namespace {

// Flat windows (a blank image region, saturated pixels) also occur in
// ordinary parameter tensors, e.g. zero biases, so they are not fingerprints.
bool distinctive(std::string_view w) {
  std::bitset<256> seen;
  for (char c : w) seen.set(static_cast<unsigned char>(c));
  return seen.count() >= PrivacyAuditor::kMinDistinctBytes;
}

}  // namespace

void PrivacyAuditor::add_sample(std::span<const float> values) {
  constexpr std::size_t kFloats = kWindowBytes / 4;
  if (values.size() < kFloats) return;
  // Middle of the sample, where image content rather than borders sits.
  const std::size_t start = (values.size() - kFloats) / 2;
  std::string w;
  w.reserve(kWindowBytes);
  for (std::size_t i = start; i < start + kFloats; ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) w.push_back(static_cast<char>(bits >> (8 * b)));
  }
  if (distinctive(w)) windows_.insert(std::move(w));
}

void PrivacyAuditor::add_bytes(ByteSpan bytes) {
  if (bytes.size() < kWindowBytes) return;
  const std::size_t start = (bytes.size() - kWindowBytes) / 2;
  std::string w(reinterpret_cast<const char*>(bytes.data() + start), kWindowBytes);
  if (distinctive(w)) windows_.insert(std::move(w));
}

void PrivacyAuditor::inspect(Direction direction, const std::string& client_id, ByteSpan frame) {
  ++frames_;
  bytes_ += frame.size();
  if (windows_.empty() || frame.size() < kWindowBytes) return;
  std::string_view view(reinterpret_cast<const char*>(frame.data()), frame.size());
  for (std::size_t off = 0; off + kWindowBytes <= view.size(); ++off) {
    if (windows_.count(std::string(view.substr(off, kWindowBytes))) != 0) {
      throw Error(ErrorCode::kProtocol, std::string("raw sample data found in frame ") +
                                            (direction == Direction::kToServer ? "from " : "to ") + client_id +
                                            " at offset " + std::to_string(off));
    }
  }
}

FrameObserver PrivacyAuditor::observer() {
  return [this](Direction d, const std::string& id, ByteSpan frame) { inspect(d, id, frame); };
}

}  // namespace biofed::transport
