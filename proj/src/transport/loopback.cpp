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

#include "transport/loopback.hpp"

namespace biofed::transport {

void LoopbackTransport::connect(const std::string& client_id, ClientHandler handler, ClientOptions options) {
  Message join{options.protocol_version, 0, Join{client_id}};
  const Bytes join_frame = encode(join, max_frame_bytes_);
  observe(Direction::kToServer, client_id, join_frame);
  Message reply;
  try {
    const Message in = decode(join_frame, kProtocolVersion, max_frame_bytes_);
    if (endpoints_.count(client_id) != 0) throw Error(ErrorCode::kDuplicate, "client id " + client_id);
    reply = Message{kProtocolVersion, 0, JoinAck{std::get<Join>(in.body).client_id}};
  } catch (const Error& e) {
    const Bytes err = encode(Message{kProtocolVersion, 0, ErrorMsg{static_cast<std::uint16_t>(e.code()), e.what()}},
                             max_frame_bytes_);
    observe(Direction::kToClient, client_id, err);
    throw;
  }
  observe(Direction::kToClient, client_id, encode(reply, max_frame_bytes_));
  endpoints_[client_id] = Endpoint{std::move(handler), options, {}};
}

std::vector<std::string> LoopbackTransport::clients() const {
  std::vector<std::string> ids;
  for (const auto& [id, ep] : endpoints_) ids.push_back(id);
  return ids;
}

void LoopbackTransport::send(const std::string& client_id, const Message& msg) {
  auto it = endpoints_.find(client_id);
  if (it == endpoints_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown client " + client_id);
  Endpoint& ep = it->second;
  const Bytes frame = encode(msg, max_frame_bytes_);
  observe(Direction::kToClient, client_id, frame);
  if (ep.options.unresponsive) return;
  const Message in = decode(frame, ep.options.protocol_version, max_frame_bytes_);
  std::optional<Message> reply = ep.handler(in);
  if (!reply) return;
  Bytes out = encode(*reply, max_frame_bytes_);
  observe(Direction::kToServer, client_id, out);
  ep.outbox.push_back(std::move(out));
}

std::optional<Inbound> LoopbackTransport::receive(Clock::time_point) {
  for (auto& [id, ep] : endpoints_) {
    if (ep.outbox.empty()) continue;
    Bytes frame = std::move(ep.outbox.front());
    ep.outbox.pop_front();
    try {
      return Inbound{id, decode(frame, kProtocolVersion, max_frame_bytes_), {}};
    } catch (const Error& e) {
      return Inbound{id, std::nullopt, e.what()};
    }
  }
  return std::nullopt;
}

}  // namespace biofed::transport
