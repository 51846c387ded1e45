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

#ifndef BIOFED_TRANSPORT_LOOPBACK_HPP_
#define BIOFED_TRANSPORT_LOOPBACK_HPP_

#include <deque>
#include <map>
#include <string>

#include "transport/transport.hpp"

namespace biofed::transport {

// In-process transport for deterministic simulation. Every message is still
// encoded to a frame and decoded on the other side. Client handlers run
// synchronously inside send(); receive() releases queued replies in
// client-id order and never blocks, so an empty queue is an immediate
// timeout.
class LoopbackTransport final : public ServerTransport {
 public:
  struct ClientOptions {
    // Drops every instruction after the handshake, simulating a client that
    // never responds.
    bool unresponsive = false;
    std::uint16_t protocol_version = kProtocolVersion;
  };

  explicit LoopbackTransport(std::size_t max_frame_bytes = kDefaultMaxFrameBytes)
      : max_frame_bytes_(max_frame_bytes) {}

  // Performs the Join/JoinAck handshake. A version mismatch or duplicate id
  // answers with an Error frame and throws.
  void connect(const std::string& client_id, ClientHandler handler, ClientOptions options);
  void connect(const std::string& client_id, ClientHandler handler) { connect(client_id, std::move(handler), {}); }

  std::vector<std::string> clients() const override;
  void send(const std::string& client_id, const Message& msg) override;
  std::optional<Inbound> receive(Clock::time_point deadline) override;
  void set_observer(FrameObserver observer) override { observer_ = std::move(observer); }

 private:
  struct Endpoint {
    ClientHandler handler;
    ClientOptions options;
    std::deque<Bytes> outbox;
  };

  void observe(Direction d, const std::string& id, ByteSpan frame) {
    if (observer_) observer_(d, id, frame);
  }

  std::size_t max_frame_bytes_;
  std::map<std::string, Endpoint> endpoints_;
  FrameObserver observer_;
};

}  // namespace biofed::transport

#endif  // BIOFED_TRANSPORT_LOOPBACK_HPP_
