#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "assist/protocol.hpp"
#include "assist/session.hpp"

namespace assist {

struct ServerOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 0;                // TCP line protocol; 0 picks a free port
  std::optional<unsigned short> ws_port;  // WebSocket bridge, same messages one per text frame
  std::string transcript_path;            // rewritten after every handled input when set
};

// Session service. One operator connection at a time; a dropped operator
// pauses the session until the next Hello, which gets a full snapshot.
//
// Threads: a network worker (Asio) owns the sockets, a session loop owns the
// Session, and each input runs on a separate planner worker that the loop
// waits for. They talk through a queue and posted callbacks only.
class Server {
 public:
  Server(ExperimentConfig config, TrialSpec spec, Mode mode, ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the listeners and starts the workers. Throws IoError.
  void start();
  // Cancels any running plan and joins all workers. Idempotent.
  void stop();

  unsigned short port() const;
  std::optional<unsigned short> ws_port() const;

  // Waits until the trial has a result; false on timeout.
  bool wait_finished(std::chrono::milliseconds timeout);
  std::optional<TrialRecord> result() const;
  // Session transcript as of the last handled input.
  std::string transcript() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Transport { Tcp, WebSocket };

// Blocking client for tools and tests. Outgoing seqs are assigned here.
class Client {
 public:
  Client(const std::string& host, unsigned short port, Transport transport = Transport::Tcp);
  ~Client();
  Client(Client&&) noexcept;
  Client& operator=(Client&&) noexcept;

  // Sends `kind` with the next seq and returns that seq.
  std::uint64_t send(MessageKind kind, const nlohmann::json& payload);
  // Sends a raw line (newline added if missing); does not consume a seq.
  void send_raw(const std::string& line);
  // Next message from the server. Throws IoError once the server closes the
  // connection, ParseError for malformed lines.
  Message receive();
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ClientRun {
  std::optional<TrialRecord> record;
  std::vector<Message> received;
};

// Hello, then every input of `log` in order, each waiting for its Ack/Error.
// Stops early once a TrialResult arrives.
ClientRun run_client(const std::string& host, unsigned short port, const std::vector<OperatorInput>& log,
                     Transport transport = Transport::Tcp);

}  // namespace assist
