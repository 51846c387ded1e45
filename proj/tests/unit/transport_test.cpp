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

#include <future>
#include <map>
#include <thread>

#include <gtest/gtest.h>

#include "common/rng.hpp"
#include "data/synthetic.hpp"
#include "fed/site_client.hpp"
#include "support/test_util.hpp"
#include "transport/audit.hpp"
#include "transport/loopback.hpp"
#include "transport/socket.hpp"

namespace biofed::transport {
namespace {

using namespace std::chrono_literals;
using biofed::testing::random_params;

// Answers a FitInstruction by scaling every value by the id's last digit.
ClientHandler scaling_handler(const std::string& id) {
  return [id](const Message& msg) -> std::optional<Message> {
    const auto* fit = std::get_if<FitInstruction>(&msg.body);
    if (!fit) return std::nullopt;
    nn::ModelParameters p = fit->params;
    const float k = static_cast<float>(id.back() - '0');
    for (auto& e : p) {
      for (float& v : e.tensor.values()) v *= k;
    }
    return Message{kProtocolVersion, msg.round, FitResultMsg{id, p, 10, 0.5}};
  };
}

Clock::time_point soon(std::chrono::milliseconds d = 5000ms) { return Clock::now() + d; }

TEST(LoopbackTest, RepliesReleasedInClientIdOrder) {
  LoopbackTransport t;
  for (const char* id : {"client-2", "client-0", "client-1"}) t.connect(id, scaling_handler(id));
  EXPECT_EQ(t.clients(), (std::vector<std::string>{"client-0", "client-1", "client-2"}));
  Rng rng(1);
  const auto params = random_params(rng, 2);
  for (const char* id : {"client-1", "client-2", "client-0"}) {
    t.send(id, Message{kProtocolVersion, 4, FitInstruction{params, {}}});
  }
  for (const char* id : {"client-0", "client-1", "client-2"}) {
    auto in = t.receive(soon());
    ASSERT_TRUE(in && in->message);
    EXPECT_EQ(in->client_id, id);
    EXPECT_EQ(in->message->round, 4u);
  }
  EXPECT_FALSE(t.receive(soon(0ms)).has_value());
}

TEST(LoopbackTest, HandshakeRejections) {
  LoopbackTransport t;
  std::vector<std::uint8_t> tags;
  t.set_observer([&](Direction, const std::string&, ByteSpan f) { tags.push_back(f[4]); });
  t.connect("client-0", scaling_handler("client-0"));
  EXPECT_ERROR_CODE(t.connect("client-0", scaling_handler("client-0")), ErrorCode::kDuplicate);
  EXPECT_ERROR_CODE(t.connect("client-1", scaling_handler("client-1"), {false, 2}), ErrorCode::kVersionMismatch);
  EXPECT_EQ(tags.back(), static_cast<std::uint8_t>(MessageTag::kError));
  EXPECT_EQ(t.clients().size(), 1u);
  EXPECT_ERROR_CODE(t.send("client-9", Message{kProtocolVersion, 1, Shutdown{}}), ErrorCode::kInvalidArgument);
}

TEST(LoopbackTest, UnresponsiveClientProducesNothing) {
  LoopbackTransport t;
  t.connect("client-0", scaling_handler("client-0"), {true, kProtocolVersion});
  Rng rng(2);
  t.send("client-0", Message{kProtocolVersion, 1, FitInstruction{random_params(rng, 1), {}}});
  EXPECT_FALSE(t.receive(soon(10ms)).has_value());
}

struct ClientThread {
  std::thread thread;
  std::future<std::string> outcome;  // empty on clean shutdown, else the error text
};

ClientThread start_client(std::uint16_t port, const std::string& id, std::uint16_t version = kProtocolVersion,
                          ClientHandler handler = nullptr) {
  std::promise<std::string> done;
  ClientThread c;
  c.outcome = done.get_future();
  ClientOptions opts;
  opts.port = port;
  opts.protocol_version = version;
  opts.connect_timeout = 5000ms;
  opts.idle_timeout = 10000ms;
  if (!handler) handler = scaling_handler(id);
  c.thread = std::thread([opts, id, handler, done = std::move(done)]() mutable {
    try {
      run_client(opts, id, handler);
      done.set_value("");
    } catch (const std::exception& e) {
      done.set_value(e.what());
    }
  });
  return c;
}

TEST(SocketTest, MatchesLoopbackExchange) {
  SocketServer server({});
  ASSERT_NE(server.port(), 0);
  std::vector<ClientThread> threads;
  for (const char* id : {"client-0", "client-1", "client-2"}) threads.push_back(start_client(server.port(), id));
  ASSERT_EQ(server.accept_clients(3, soon()), 3u);

  LoopbackTransport loop;
  for (const char* id : {"client-0", "client-1", "client-2"}) loop.connect(id, scaling_handler(id));

  Rng rng(3);
  const auto params = random_params(rng, 3);
  std::size_t frames = 0;
  server.set_observer([&](Direction, const std::string&, ByteSpan) { ++frames; });
  for (const auto& id : server.clients()) {
    server.send(id, Message{kProtocolVersion, 1, FitInstruction{params, {}}});
    loop.send(id, Message{kProtocolVersion, 1, FitInstruction{params, {}}});
  }
  std::map<std::string, Message> over_socket, over_loop;
  for (int i = 0; i < 3; ++i) {
    auto a = server.receive(soon());
    auto b = loop.receive(soon());
    ASSERT_TRUE(a && a->message) << (a ? a->detail : "timeout");
    ASSERT_TRUE(b && b->message);
    over_socket.emplace(a->client_id, *a->message);
    over_loop.emplace(b->client_id, *b->message);
  }
  EXPECT_EQ(over_socket, over_loop);
  EXPECT_EQ(frames, 6u);

  server.broadcast_shutdown(2);
  for (auto& c : threads) {
    c.thread.join();
    EXPECT_EQ(c.outcome.get(), "");
  }
}

TEST(SocketTest, WrongVersionAndDuplicateRejected) {
  SocketServer server({});
  auto good = start_client(server.port(), "client-0");
  ASSERT_EQ(server.accept_clients(1, soon()), 1u);

  auto dup = start_client(server.port(), "client-0");
  EXPECT_EQ(server.accept_clients(2, soon(1500ms)), 1u);
  dup.thread.join();
  EXPECT_NE(dup.outcome.get().find("duplicate"), std::string::npos);

  auto old = start_client(server.port(), "client-1", 2);
  EXPECT_EQ(server.accept_clients(2, soon(1500ms)), 1u);
  old.thread.join();
  EXPECT_NE(old.outcome.get().find("version-mismatch"), std::string::npos);

  server.broadcast_shutdown(0);
  good.thread.join();
  EXPECT_EQ(good.outcome.get(), "");
}

TEST(SocketTest, DisconnectSurfacesAsEmptyInbound) {
  SocketServer server({});
  auto c = start_client(server.port(), "client-0", kProtocolVersion,
                        [](const Message&) -> std::optional<Message> { throw Error(ErrorCode::kIo, "site crashed"); });
  ASSERT_EQ(server.accept_clients(1, soon()), 1u);
  Rng rng(4);
  server.send("client-0", Message{kProtocolVersion, 1, FitInstruction{random_params(rng, 1), {}}});
  c.thread.join();
  EXPECT_NE(c.outcome.get().find("site crashed"), std::string::npos);
  auto in = server.receive(soon());
  ASSERT_TRUE(in);
  EXPECT_EQ(in->client_id, "client-0");
  EXPECT_FALSE(in->message.has_value());
  EXPECT_TRUE(server.clients().empty());
}

TEST(SocketTest, ConnectTimesOutWithoutServer) {
  ClientOptions opts;
  opts.port = 1;
  opts.connect_timeout = 200ms;
  EXPECT_ERROR_CODE(run_client(opts, "client-0", scaling_handler("client-0")), ErrorCode::kConnectionRefused);
}

TEST(AuditTest, DetectsInjectedSampleAnywhereInFrame) {
  Rng rng(6);
  std::vector<float> sample(256);
  for (float& v : sample) v = static_cast<float>(rng.normal());
  PrivacyAuditor audit;
  audit.add_sample(sample);

  nn::ModelParameters clean = random_params(rng, 3);
  audit.inspect(Direction::kToServer, "client-0",
                encode(Message{kProtocolVersion, 1, FitResultMsg{"client-0", clean, 5, 0.1}}));

  nn::ModelParameters leaky = clean;
  leaky.add("leak", nn::Tensor({256}, sample));
  EXPECT_ERROR_CODE(audit.inspect(Direction::kToServer, "client-0",
                                  encode(Message{kProtocolVersion, 1, FitResultMsg{"client-0", leaky, 5, 0.1}})),
                    ErrorCode::kProtocol);
  EXPECT_EQ(audit.frames_inspected(), 2u);
}

TEST(AuditTest, DetectsEmbeddedImageFileBytes) {
  Rng rng(7);
  Bytes file{'P', '5', '\n', '8', ' ', '8', '\n', '2', '5', '5', '\n'};
  for (int i = 0; i < 64; ++i) file.push_back(static_cast<std::uint8_t>(rng.below(256)));
  PrivacyAuditor audit;
  audit.add_bytes(file);
  const Message m{kProtocolVersion, 1, ErrorMsg{1, std::string(file.begin(), file.end())}};
  EXPECT_ERROR_CODE(audit.inspect(Direction::kToServer, "client-2", encode(m)), ErrorCode::kProtocol);
  // A header alone is not a fingerprint.
  audit.inspect(Direction::kToServer, "client-2",
                encode(Message{kProtocolVersion, 1, ErrorMsg{1, std::string(file.begin(), file.begin() + 11)}}));
}

TEST(AuditTest, FlatWindowsAreNotFingerprints) {
  PrivacyAuditor audit;
  audit.add_sample(std::vector<float>(64, 0.0f));
  audit.add_sample(std::vector<float>(64, 1.0f));
  audit.add_bytes(Bytes(100, 0));
  EXPECT_EQ(audit.fingerprints(), 0u);
  nn::ModelParameters zeros;
  zeros.add("bias", nn::Tensor({64}));
  audit.inspect(Direction::kToClient, "client-0",
                encode(Message{kProtocolVersion, 1, FitInstruction{zeros, {}}}));
}

TEST(AuditTest, SiteClientTrafficIsClean) {
  const data::Dataset ds = data::synthesize(data::SyntheticSpec{3, 12, {1, 8, 8}, 5, 0.2, 0.2});
  const nn::Architecture arch = nn::reference_cnn({1, 8, 8}, 3);
  PrivacyAuditor audit;
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    audit.add_sample(ds.images[i].values());
    audit.add_sample(ds.raw[i].values());
  }
  LoopbackTransport t;
  t.set_observer(audit.observer());
  fed::SiteClient site("client-0", arch, ds.gather(ds.train_indices()));
  t.connect("client-0", [&](const Message& m) { return site.handle(m); });
  t.send("client-0", Message{kProtocolVersion, 1, FitInstruction{nn::init_parameters(arch, 1), {0.05, 8, 1, 1}}});
  t.send("client-0", Message{kProtocolVersion, 1, EvaluateInstruction{nn::init_parameters(arch, 1)}});
  ASSERT_TRUE(t.receive(soon()));
  ASSERT_TRUE(t.receive(soon()));
  EXPECT_EQ(audit.frames_inspected(), 6u);
}

}  // namespace
}  // namespace biofed::transport
