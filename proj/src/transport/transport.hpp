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

#ifndef BIOFED_TRANSPORT_TRANSPORT_HPP_
#define BIOFED_TRANSPORT_TRANSPORT_HPP_

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "transport/message.hpp"

namespace biofed::transport {

using Clock = std::chrono::steady_clock;

enum class Direction { kToClient, kToServer };

// Sees every encoded frame that crosses a transport.
using FrameObserver = std::function<void(Direction, const std::string& client_id, ByteSpan frame)>;

struct Inbound {
  std::string client_id;
  // Empty when the session ended (disconnect or protocol failure).
  std::optional<Message> message;
  std::string detail;
};

// Server-side view of the connected clients. The round state machine is the
// only consumer and calls these from a single thread.
class ServerTransport {
 public:
  virtual ~ServerTransport() = default;

  // Connected client ids, sorted.
  virtual std::vector<std::string> clients() const = 0;
  virtual void send(const std::string& client_id, const Message& msg) = 0;
  // Next inbound message, or nullopt once the deadline passes.
  virtual std::optional<Inbound> receive(Clock::time_point deadline) = 0;
  virtual void set_observer(FrameObserver observer) = 0;
};

// Client-side message handler: one reply (or none) per server message.
using ClientHandler = std::function<std::optional<Message>(const Message&)>;

}  // namespace biofed::transport

#endif  // BIOFED_TRANSPORT_TRANSPORT_HPP_
