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

#include "transport/socket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "common/log.hpp"

namespace biofed::transport {

namespace {

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  if (left <= 0) return 0;
  return left > 1'000'000 ? 1'000'000 : static_cast<int>(left);
}

// Waits for readability; false on timeout.
bool wait_readable(int fd, Clock::time_point deadline) {
  for (;;) {
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) throw Error(ErrorCode::kIo, std::string("poll: ") + std::strerror(errno));
  }
}

// Reads exactly n bytes; false on timeout before the first byte when
// `allow_timeout`, throws kDisconnected on EOF.
bool read_exact(int fd, std::uint8_t* dst, std::size_t n, Clock::time_point deadline) {
  std::size_t got = 0;
  while (got < n) {
    if (!wait_readable(fd, deadline)) {
      if (got == 0) return false;
      throw Error(ErrorCode::kTimeout, "peer stalled mid-frame");
    }
    const ssize_t rc = ::recv(fd, dst + got, n - got, 0);
    if (rc == 0) throw Error(ErrorCode::kDisconnected, "peer closed the connection");
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kDisconnected, std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(rc);
  }
  return true;
}

std::optional<Bytes> read_frame(int fd, Clock::time_point deadline, std::size_t max_frame_bytes) {
  Bytes frame(kFrameHeaderBytes);
  if (!read_exact(fd, frame.data(), kFrameHeaderBytes, deadline)) return std::nullopt;
  const FrameHeader h = parse_header(frame, max_frame_bytes);
  frame.resize(kFrameHeaderBytes + h.body_length);
  if (h.body_length > 0 &&
      !read_exact(fd, frame.data() + kFrameHeaderBytes, h.body_length, Clock::time_point::max())) {
    throw Error(ErrorCode::kTruncatedFrame, "frame body missing");
  }
  return frame;
}

void write_all(int fd, ByteSpan data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t rc = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kDisconnected, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(rc);
  }
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res);
  if (rc != 0 || res == nullptr) {
    throw Error(ErrorCode::kConnectionRefused, "cannot resolve " + host + ": " + gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof(addr));
  ::freeaddrinfo(res);
  addr.sin_port = htons(port);
  return addr;
}

void send_error(int fd, const Error& e, std::size_t max_frame_bytes) {
  try {
    write_all(fd, encode(Message{kProtocolVersion, 0, ErrorMsg{static_cast<std::uint16_t>(e.code()), e.what()}},
                         max_frame_bytes));
  } catch (const Error&) {
  }
}

}  // namespace

struct SocketServer::Session {
  std::string id;
  int fd = -1;
  std::mutex write_mu;
  std::thread reader;
  bool alive = true;
};

SocketServer::SocketServer(Options options) : options_(std::move(options)) {
  const sockaddr_in addr = resolve(options_.host, options_.port);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::kIo, std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(ErrorCode::kIo, "cannot listen on " + options_.host + ":" + std::to_string(options_.port) + ": " + why);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

SocketServer::~SocketServer() { close(); }

void SocketServer::close() {
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  for (auto& [id, s] : sessions_) {
    if (s->fd >= 0) ::shutdown(s->fd, SHUT_RDWR);
    if (s->reader.joinable()) s->reader.join();
    if (s->fd >= 0) ::close(s->fd);
    s->fd = -1;
  }
  sessions_.clear();
}

std::size_t SocketServer::accept_clients(std::size_t max_clients, Clock::time_point deadline) {
  while (sessions_.size() < max_clients) {
    if (!wait_readable(listen_fd_, deadline)) break;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    try {
      const auto hs_deadline = std::min(deadline, Clock::now() + options_.handshake_timeout);
      auto frame = read_frame(fd, hs_deadline, options_.max_frame_bytes);
      if (!frame) throw Error(ErrorCode::kTimeout, "no Join received");
      if (observer_) observer_(Direction::kToServer, "", *frame);
      const Message in = decode(*frame, kProtocolVersion, options_.max_frame_bytes);
      const auto* join = std::get_if<Join>(&in.body);
      if (!join) throw Error(ErrorCode::kProtocol, "expected Join, got " + std::string(tag_name(in.tag())));
      if (join->client_id.empty() || sessions_.count(join->client_id) != 0) {
        throw Error(ErrorCode::kDuplicate, "client id '" + join->client_id + "' is empty or already joined");
      }
      const Bytes ack = encode(Message{kProtocolVersion, 0, JoinAck{join->client_id}}, options_.max_frame_bytes);
      if (observer_) observer_(Direction::kToClient, join->client_id, ack);
      write_all(fd, ack);
      auto session = std::make_unique<Session>();
      session->id = join->client_id;
      session->fd = fd;
      Session* raw = session.get();
      sessions_[join->client_id] = std::move(session);
      raw->reader = std::thread([this, raw] { reader_loop(raw); });
      log().info("client {} joined", join->client_id);
    } catch (const Error& e) {
      log().warn("rejected connection: {}", e.what());
      send_error(fd, e, options_.max_frame_bytes);
      ::close(fd);
    }
  }
  return sessions_.size();
}

void SocketServer::reader_loop(Session* session) {
  for (;;) {
    try {
      auto frame = read_frame(session->fd, Clock::time_point::max(), options_.max_frame_bytes);
      if (!frame) continue;
      push(Event{session->id, std::move(frame), {}});
    } catch (const Error& e) {
      push(Event{session->id, std::nullopt, e.what()});
      return;
    }
  }
}

void SocketServer::push(Event event) {
  {
    std::lock_guard<std::mutex> lock(queue_mu_);
    queue_.push_back(std::move(event));
  }
  queue_cv_.notify_one();
}

std::vector<std::string> SocketServer::clients() const {
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) {
    if (s->alive) ids.push_back(id);
  }
  return ids;
}

void SocketServer::send(const std::string& client_id, const Message& msg) {
  auto it = sessions_.find(client_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown client " + client_id);
  const Bytes frame = encode(msg, options_.max_frame_bytes);
  if (observer_) observer_(Direction::kToClient, client_id, frame);
  std::lock_guard<std::mutex> lock(it->second->write_mu);
  try {
    write_all(it->second->fd, frame);
  } catch (const Error& e) {
    // Surfaces to the round as this client's missing result.
    it->second->alive = false;
    push(Event{client_id, std::nullopt, e.what()});
  }
}

std::optional<Inbound> SocketServer::receive(Clock::time_point deadline) {
  Event event;
  {
    std::unique_lock<std::mutex> lock(queue_mu_);
    if (!queue_cv_.wait_until(lock, deadline, [this] { return !queue_.empty(); })) return std::nullopt;
    event = std::move(queue_.front());
    queue_.pop_front();
  }
  if (!event.frame) {
    if (auto it = sessions_.find(event.client_id); it != sessions_.end()) it->second->alive = false;
    return Inbound{event.client_id, std::nullopt, event.detail};
  }
  if (observer_) observer_(Direction::kToServer, event.client_id, *event.frame);
  try {
    return Inbound{event.client_id, decode(*event.frame, kProtocolVersion, options_.max_frame_bytes), {}};
  } catch (const Error& e) {
    return Inbound{event.client_id, std::nullopt, e.what()};
  }
}

void SocketServer::broadcast_shutdown(std::uint32_t round) {
  for (const auto& id : clients()) {
    try {
      send(id, Message{kProtocolVersion, round, Shutdown{}});
    } catch (const Error&) {
    }
  }
}

void run_client(const ClientOptions& options, const std::string& client_id, const ClientHandler& handler) {
  const sockaddr_in addr = resolve(options.host, options.port);
  const auto connect_deadline = Clock::now() + options.connect_timeout;
  int fd = -1;
  for (;;) {
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error(ErrorCode::kIo, std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) break;
    ::close(fd);
    if (Clock::now() >= connect_deadline) {
      throw Error(ErrorCode::kConnectionRefused, options.host + ":" + std::to_string(options.port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  struct Closer {
    int fd;
    ~Closer() { ::close(fd); }
  } closer{fd};
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  auto next = [&](const char* waiting_for) {
    auto frame = read_frame(fd, Clock::now() + options.idle_timeout, options.max_frame_bytes);
    if (!frame) throw Error(ErrorCode::kTimeout, std::string("no message while waiting for ") + waiting_for);
    Message msg = decode(*frame, options.protocol_version, options.max_frame_bytes);
    if (const auto* err = std::get_if<ErrorMsg>(&msg.body)) {
      const auto code = err->code <= static_cast<std::uint16_t>(ErrorCode::kNotClose)
                            ? static_cast<ErrorCode>(err->code)
                            : ErrorCode::kProtocol;
      throw Error(code, "server: " + err->text);
    }
    return msg;
  };

  write_all(fd, encode(Message{options.protocol_version, 0, Join{client_id}}, options.max_frame_bytes));
  const Message ack = next("JoinAck");
  if (!std::holds_alternative<JoinAck>(ack.body)) {
    throw Error(ErrorCode::kProtocol, std::string("expected JoinAck, got ") + tag_name(ack.tag()));
  }
  for (;;) {
    const Message msg = next("instructions");
    if (std::holds_alternative<Shutdown>(msg.body)) return;
    std::optional<Message> reply = handler(msg);
    if (reply) {
      reply->version = options.protocol_version;
      write_all(fd, encode(*reply, options.max_frame_bytes));
    }
  }
}

}  // namespace biofed::transport
