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

#ifndef BIOFED_TRANSPORT_SOCKET_HPP_
#define BIOFED_TRANSPORT_SOCKET_HPP_

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "transport/transport.hpp"

namespace biofed::transport {

// TCP server endpoint. One reader thread per session pushes raw frames into a
// queue; decoding and observation happen on the caller's thread in receive().
class SocketServer final : public ServerTransport {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks an ephemeral port
    std::size_t max_frame_bytes = kDefaultMaxFrameBytes;
    std::chrono::milliseconds handshake_timeout{5000};
  };

  explicit SocketServer(Options options);
  ~SocketServer() override;
  SocketServer(const SocketServer&) = delete;
  SocketServer& operator=(const SocketServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  // Accepts and handshakes sessions until `max_clients` have joined or the
  // deadline passes; returns the number joined. Peers with the wrong protocol
  // version or a duplicate id get an Error frame and are disconnected.
  std::size_t accept_clients(std::size_t max_clients, Clock::time_point deadline);

  std::vector<std::string> clients() const override;
  void send(const std::string& client_id, const Message& msg) override;
  std::optional<Inbound> receive(Clock::time_point deadline) override;
  void set_observer(FrameObserver observer) override { observer_ = std::move(observer); }

  // Sends Shutdown to every live session; errors are ignored.
  void broadcast_shutdown(std::uint32_t round);
  void close();

 private:
  struct Session;
  struct Event {
    std::string client_id;
    std::optional<Bytes> frame;
    std::string detail;
  };

  void reader_loop(Session* session);
  void push(Event event);

  Options options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<Event> queue_;
  FrameObserver observer_;
};

struct ClientOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::uint16_t protocol_version = kProtocolVersion;
  std::size_t max_frame_bytes = kDefaultMaxFrameBytes;
  // Connection attempts are retried until this elapses.
  std::chrono::milliseconds connect_timeout{10000};
  // Longest wait for the next server message.
  std::chrono::milliseconds idle_timeout{600000};
};

// Connects, joins as `client_id` and answers server messages with `handler`
// until Shutdown. Server Error frames, version mismatches and disconnects are
// raised as biofed::Error.
void run_client(const ClientOptions& options, const std::string& client_id, const ClientHandler& handler);

}  // namespace biofed::transport

#endif  // BIOFED_TRANSPORT_SOCKET_HPP_
