#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "assist/harness.hpp"
#include "assist/server.hpp"

using namespace assist;
using namespace std::chrono_literals;

namespace {

struct Fixture {
  ExperimentConfig cfg;
  TrialSpec spec;
  TrialRun reference;

  Fixture(ObjectClass c, Mode mode) : spec(make_trial(cfg, c, 1)), reference(run_trial(cfg, c, 1, mode)) {}
};

Message receive_until(Client& client, MessageKind kind, std::vector<Message>* seen = nullptr) {
  for (;;) {
    Message m = client.receive();
    if (seen) seen->push_back(m);
    if (m.kind == kind) return m;
  }
}

std::uint64_t send_input(Client& client, const OperatorInput& in) {
  if (in.command && in.command->kind == CommandKind::MarkerMove) {
    return client.send(MessageKind::MarkerMove, {{"du", in.command->du}, {"dv", in.command->dv}});
  }
  return client.send(MessageKind::Command, in.to_json());
}

Message wait_ack(Client& client, std::uint64_t seq) {
  for (;;) {
    Message m = client.receive();
    if ((m.kind == MessageKind::Ack || m.kind == MessageKind::Error) &&
        m.payload.value("ref_seq", nlohmann::json()) == nlohmann::json(seq)) {
      return m;
    }
  }
}

// Connects and says Hello, retrying while the previous operator is still
// being torn down on the server side.
Client connect_operator(unsigned short port, Message& snapshot) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    Client c("127.0.0.1", port);
    c.send(MessageKind::Hello, {{"client", "test"}});
    Message m = c.receive();
    if (m.kind == MessageKind::SceneSnapshot) {
      snapshot = m;
      return c;
    }
    std::this_thread::sleep_for(20ms);
  }
  throw Error(ErrorCode::IoError, "server kept refusing");
}

}  // namespace

TEST(Server, HelloGetsSeededSnapshotAsSeqOne) {
  Fixture f(ObjectClass::Ball, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  Client c("127.0.0.1", server.port());
  c.send(MessageKind::Hello, {{"client", "test"}});
  const Message m = c.receive();
  EXPECT_EQ(m.seq, 1u);
  ASSERT_EQ(m.kind, MessageKind::SceneSnapshot);
  EXPECT_EQ(m.payload, Session(f.cfg, f.spec, Mode::SemiAuto).snapshot());
  EXPECT_EQ(m.payload.at("scene"), scene_to_json(f.spec.scene));
}

TEST(Server, SecondOperatorRefused) {
  Fixture f(ObjectClass::Tape, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  Client first("127.0.0.1", server.port());
  first.send(MessageKind::Hello, nlohmann::json::object());
  ASSERT_EQ(first.receive().kind, MessageKind::SceneSnapshot);
  Client second("127.0.0.1", server.port());
  const Message m = second.receive();
  ASSERT_EQ(m.kind, MessageKind::Error);
  EXPECT_EQ(m.payload.at("code"), "Busy");
  EXPECT_THROW(second.receive(), Error);
  // The first operator is unaffected.
  const auto seq = send_input(first, f.reference.log.front());
  EXPECT_EQ(wait_ack(first, seq).kind, MessageKind::Ack);
}

TEST(Server, MalformedLinesKeepConnectionOpen) {
  Fixture f(ObjectClass::Ball, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  Client c("127.0.0.1", server.port());
  c.send_raw("this is not json");
  Message m = c.receive();
  ASSERT_EQ(m.kind, MessageKind::Error);
  EXPECT_EQ(m.payload.at("code"), "ParseError");
  EXPECT_TRUE(m.payload.at("ref_seq").is_null());
  c.send_raw(R"({"kind":"Teleport","payload":{},"seq":1,"v":1})");
  m = c.receive();
  EXPECT_EQ(m.payload.at("code"), "ParseError");
  c.send(MessageKind::Hello, nlohmann::json::object());
  EXPECT_EQ(c.receive().kind, MessageKind::SceneSnapshot);
}

TEST(Server, SequenceGapIsProtocolError) {
  Fixture f(ObjectClass::Ball, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  Client c("127.0.0.1", server.port());
  c.send_raw(R"({"kind":"Hello","payload":{},"seq":7,"v":1})");
  const Message m = c.receive();
  ASSERT_EQ(m.kind, MessageKind::Error);
  EXPECT_EQ(m.payload.at("code"), "ProtocolError");
  EXPECT_EQ(m.payload.at("ref_seq"), 7);
}

TEST(Server, CommandsNeedHello) {
  Fixture f(ObjectClass::Ball, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  Client c("127.0.0.1", server.port());
  const auto seq = c.send(MessageKind::Command, {{"cmd", "SELECT"}});
  const Message m = wait_ack(c, seq);
  ASSERT_EQ(m.kind, MessageKind::Error);
  EXPECT_EQ(m.payload.at("code"), "ProtocolError");
}

TEST(Server, IgnoredInputGetsInvalidState) {
  Fixture f(ObjectClass::Ball, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  Client c("127.0.0.1", server.port());
  c.send(MessageKind::Hello, nlohmann::json::object());
  receive_until(c, MessageKind::SceneSnapshot);
  // Jogging is a cartesian-mode input.
  const auto seq = c.send(MessageKind::Command, {{"jog", "TX+"}});
  const Message m = wait_ack(c, seq);
  ASSERT_EQ(m.kind, MessageKind::Error);
  EXPECT_EQ(m.payload.at("code"), "InvalidState");
  // A menu-level mistake is still accepted input: it costs time and warns.
  EXPECT_EQ(wait_ack(c, c.send(MessageKind::MarkerMove, {{"du", 5.0}, {"dv", 0.0}})).kind, MessageKind::Ack);
}

TEST(Server, OutgoingSeqsAreConsecutive) {
  Fixture f(ObjectClass::Bowl, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  const ClientRun run = run_client("127.0.0.1", server.port(), f.reference.log);
  ASSERT_FALSE(run.received.empty());
  for (std::size_t i = 0; i < run.received.size(); ++i) EXPECT_EQ(run.received[i].seq, i + 1);
  bool saw_status = false, saw_phase = false, saw_menu = false;
  for (const auto& m : run.received) {
    saw_status |= m.kind == MessageKind::RobotStatus;
    saw_phase |= m.kind == MessageKind::PhaseUpdate;
    saw_menu |= m.kind == MessageKind::MenuUpdate;
  }
  EXPECT_TRUE(saw_status);
  EXPECT_TRUE(saw_phase);
  EXPECT_TRUE(saw_menu);
}

TEST(Server, WireMatchesInProcess) {
  for (Mode mode : {Mode::SemiAuto, Mode::Cartesian}) {
    for (Transport transport : {Transport::Tcp, Transport::WebSocket}) {
      Fixture f(ObjectClass::Stapler, mode);
      ServerOptions opts;
      opts.ws_port = 0;
      Server server(f.cfg, f.spec, mode, opts);
      server.start();
      const unsigned short port = transport == Transport::Tcp ? server.port() : *server.ws_port();
      const ClientRun run = run_client("127.0.0.1", port, f.reference.log, transport);
      ASSERT_TRUE(run.record.has_value());
      ASSERT_TRUE(server.wait_finished(5000ms));
      EXPECT_EQ(record_to_json(*run.record), record_to_json(f.reference.record));
      EXPECT_EQ(server.transcript(), f.reference.transcript);
    }
  }
}

TEST(Server, ReconnectResumesWithSnapshot) {
  Fixture f(ObjectClass::Banana, Mode::SemiAuto);
  const auto& log = f.reference.log;
  ASSERT_GE(log.size(), 2u);
  const std::size_t half = log.size() / 2;
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  {
    Message snap;
    Client c = connect_operator(server.port(), snap);
    for (std::size_t i = 0; i < half; ++i) wait_ack(c, send_input(c, log[i]));
    c.close();
  }
  const Session partial = replay(f.cfg, f.spec, Mode::SemiAuto, {log.begin(), log.begin() + static_cast<long>(half)});
  Message snap;
  Client c = connect_operator(server.port(), snap);
  EXPECT_EQ(snap.seq, 1u);
  EXPECT_EQ(snap.payload, partial.snapshot());
  for (std::size_t i = half; i < log.size(); ++i) wait_ack(c, send_input(c, log[i]));
  ASSERT_TRUE(server.wait_finished(5000ms));
  EXPECT_EQ(server.transcript(), f.reference.transcript);
}

TEST(Server, StopIsIdempotent) {
  Fixture f(ObjectClass::Ball, Mode::SemiAuto);
  Server server(f.cfg, f.spec, Mode::SemiAuto);
  server.start();
  server.stop();
  server.stop();
  EXPECT_FALSE(server.result().has_value());
}
