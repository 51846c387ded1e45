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

#ifndef BIOFED_TRANSPORT_AUDIT_HPP_
#define BIOFED_TRANSPORT_AUDIT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>

#include "transport/transport.hpp"

namespace biofed::transport {

// Runtime check that no frame carries raw training data. Registered samples
// are fingerprinted by a 32-byte window of their float encoding; every frame
// is scanned at every byte offset for those windows. Windows with fewer
// than kMinDistinctBytes distinct byte values are not registered.
class PrivacyAuditor {
 public:
  static constexpr std::size_t kWindowBytes = 32;
  static constexpr std::size_t kMinDistinctBytes = 8;

  // Adds fingerprints for a sample given as floats (raw or standardized).
  void add_sample(std::span<const float> values);
  // Adds a fingerprint for raw file bytes (middle window, past any header).
  void add_bytes(ByteSpan bytes);

  // Throws kProtocol naming the client if the frame contains a fingerprint.
  void inspect(Direction direction, const std::string& client_id, ByteSpan frame);

  std::size_t frames_inspected() const noexcept { return frames_; }
  std::size_t bytes_inspected() const noexcept { return bytes_; }
  std::size_t fingerprints() const noexcept { return windows_.size(); }

  FrameObserver observer();

 private:
  std::unordered_set<std::string> windows_;
  std::size_t frames_ = 0;
  std::size_t bytes_ = 0;
};

}  // namespace biofed::transport

#endif  // BIOFED_TRANSPORT_AUDIT_HPP_
