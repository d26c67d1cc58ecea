#include "assist/server.hpp"

#include <condition_variable>
#include <deque>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace assist {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
using tcp = boost::asio::ip::tcp;
using boost::system::error_code;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxLine = 1 << 20;

struct Inbound {
  enum class Type { Connected, Disconnected, Line, Shutdown };
  Type type = Type::Shutdown;
  int id = 0;
  std::string line;
};

class Inbox {
 public:
  void push(Inbound in) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(in));
    }
    cv_.notify_one();
  }
  Inbound pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !queue_.empty(); });
    Inbound in = std::move(queue_.front());
    queue_.pop_front();
    return in;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Inbound> queue_;
};

// Network-thread objects. Every member function runs on the io_context thread.
class Conn : public std::enable_shared_from_this<Conn> {
 public:
  Conn(int id, Inbox& inbox, std::function<void(int)> on_gone) : id_(id), inbox_(inbox), on_gone_(std::move(on_gone)) {}
  virtual ~Conn() = default;
  virtual void start() = 0;
  virtual void force_close() = 0;

  void send(std::string line) {
    if (gone_ || closing_) return;
    out_.push_back(std::move(line));
    if (!writing_) write_next();
  }
  void close_after_flush() {
    closing_ = true;
    if (!writing_) graceful_close();
  }

 protected:
  virtual void write_front() = 0;
  virtual void graceful_close() = 0;

  void write_next() {
    if (out_.empty()) {
      writing_ = false;
      if (closing_) graceful_close();
      return;
    }
    writing_ = true;
    write_front();
  }
  void on_written(error_code ec) {
    out_.pop_front();
    if (ec) {
      gone();
      return;
    }
    write_next();
  }
  void incoming(std::string line) { inbox_.push({Inbound::Type::Line, id_, std::move(line)}); }
  void connected() { inbox_.push({Inbound::Type::Connected, id_, {}}); }
  void gone() {
    if (gone_) return;
    gone_ = true;
    inbox_.push({Inbound::Type::Disconnected, id_, {}});
    on_gone_(id_);
  }

  int id_;
  Inbox& inbox_;
  std::function<void(int)> on_gone_;
  std::deque<std::string> out_;
  bool writing_ = false;
  bool closing_ = false;
  bool gone_ = false;
};

class TcpConn : public Conn {
 public:
  TcpConn(tcp::socket socket, int id, Inbox& inbox, std::function<void(int)> on_gone)
      : Conn(id, inbox, std::move(on_gone)), socket_(std::move(socket)), buffer_(kMaxLine) {}

  void start() override {
    connected();
    read();
  }
  void force_close() override {
    error_code ec;
    socket_.close(ec);
  }

 private:
  void read() {
    asio::async_read_until(socket_, buffer_, '\n', [self = shared_from_this(), this](error_code ec, std::size_t n) {
      if (ec) {
        gone();
        return;
      }
      auto begin = asio::buffers_begin(buffer_.data());
      std::string line(begin, begin + static_cast<std::ptrdiff_t>(n));
      buffer_.consume(n);
      incoming(std::move(line));
      read();
    });
  }
  void write_front() override {
    asio::async_write(socket_, asio::buffer(out_.front()),
                      [self = shared_from_this(), this](error_code ec, std::size_t) { on_written(ec); });
  }
  void graceful_close() override {
    error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

  tcp::socket socket_;
  asio::streambuf buffer_;
};

class WsConn : public Conn {
 public:
  WsConn(tcp::socket socket, int id, Inbox& inbox, std::function<void(int)> on_gone)
      : Conn(id, inbox, std::move(on_gone)), ws_(std::move(socket)) {
    ws_.read_message_max(kMaxLine);
  }

  void start() override {
    ws_.async_accept([self = shared_from_this(), this](error_code ec) {
      if (ec) {
        gone();
        return;
      }
      ws_.text(true);
      connected();
      read();
    });
  }
  void force_close() override {
    error_code ec;
    beast::get_lowest_layer(ws_).close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this(), this](error_code ec, std::size_t) {
      if (ec) {
        gone();
        return;
      }
      std::string line = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      incoming(std::move(line));
      read();
    });
  }
  void write_front() override {
    ws_.async_write(asio::buffer(out_.front()),
                    [self = shared_from_this(), this](error_code ec, std::size_t) { on_written(ec); });
  }
  void graceful_close() override {
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](error_code) {});
  }

  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
};

struct Peer {
  SeqTracker in;
  SeqCounter out;
  bool hello = false;
};

json status_payload(const json& ev) {
  return {{"clock", ev.at("clock")},
          {"segment", ev.at("segment")},
          {"waypoint", ev.at("waypoint")},
          {"waypoints", ev.at("waypoints")},
          {"tcp", ev.at("tcp")}};
}

}  // namespace

struct Server::Impl {
  Impl(ExperimentConfig c, TrialSpec s, Mode m, ServerOptions o)
      : options(std::move(o)), session(c, std::move(s), m) {}

  ServerOptions options;
  Session session;  // touched only by the loop and, while it waits, the planner worker

  asio::io_context ioc;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  tcp::acceptor tcp_acceptor{ioc};
  tcp::acceptor ws_acceptor{ioc};
  std::map<int, std::shared_ptr<Conn>> conns;  // network thread only
  int next_id = 0;                             // network thread only
  unsigned short bound_port = 0;
  std::optional<unsigned short> bound_ws_port;

  Inbox inbox;
  std::stop_source stop_source;
  std::thread net_thread;
  std::thread loop_thread;
  bool started = false;
  bool stopped = false;

  mutable std::mutex pub_mu;
  std::condition_variable pub_cv;
  std::string transcript;
  std::optional<TrialRecord> result;

  void listen(tcp::acceptor& acceptor, unsigned short port) {
    error_code ec;
    const tcp::endpoint ep(asio::ip::make_address(options.host, ec), port);
    if (ec) throw Error(ErrorCode::IoError, "bad host '" + options.host + "': " + ec.message());
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot listen on port " + std::to_string(port) + ": " + ec.message());
  }

  template <class C>
  void accept(tcp::acceptor& acceptor) {
    acceptor.async_accept([this, &acceptor](error_code ec, tcp::socket socket) {
      if (ec) return;
      const int id = ++next_id;
      auto conn = std::make_shared<C>(std::move(socket), id, inbox, [this](int gone) { conns.erase(gone); });
      conns[id] = conn;
      conn->start();
      accept<C>(acceptor);
    });
  }

  void post_send(int id, std::string line) {
    asio::post(ioc, [this, id, line = std::move(line)]() mutable {
      auto it = conns.find(id);
      if (it != conns.end()) it->second->send(std::move(line));
    });
  }
  void post_close(int id) {
    asio::post(ioc, [this, id] {
      auto it = conns.find(id);
      if (it != conns.end()) it->second->close_after_flush();
    });
  }

  void send(int id, Peer& peer, Message msg) {
    msg.seq = peer.out.next();
    post_send(id, encode(msg));
  }
  void send_error(int id, Peer& peer, std::optional<std::uint64_t> ref, std::string_view code, std::string_view what) {
    send(id, peer, make_error(0, ref, code, what));
  }

  void publish() {
    {
      std::lock_guard lock(pub_mu);
      transcript = session.transcript();
      result = session.result();
    }
    pub_cv.notify_all();
    if (!options.transcript_path.empty()) {
      std::ofstream out(options.transcript_path, std::ios::binary | std::ios::trunc);
      out << session.transcript();
    }
  }

  void loop() {
    std::map<int, Peer> peers;
    int operator_id = 0;  // 0: none; connection ids start at 1
    publish();
    for (;;) {
      Inbound in = inbox.pop();
      switch (in.type) {
        case Inbound::Type::Shutdown:
          return;
        case Inbound::Type::Connected: {
          Peer& peer = peers[in.id];
          if (operator_id != 0) {
            send_error(in.id, peer, std::nullopt, "Busy", "another operator is connected");
            post_close(in.id);
          } else {
            operator_id = in.id;
          }
          break;
        }
        case Inbound::Type::Disconnected:
          peers.erase(in.id);
          if (operator_id == in.id) operator_id = 0;  // paused until the next operator says Hello
          break;
        case Inbound::Type::Line:
          if (operator_id == in.id) on_line(in.id, peers[in.id], in.line);
          break;
      }
    }
  }

  void on_line(int id, Peer& peer, const std::string& line) {
    Message msg;
    try {
      msg = decode(line);
    } catch (const ParseError& e) {
      send_error(id, peer, std::nullopt, "ParseError", e.what());
      return;
    }
    try {
      peer.in.accept(msg.seq);
    } catch (const Error& e) {
      send_error(id, peer, msg.seq, "ProtocolError", e.what());
      return;
    }
    if (msg.kind == MessageKind::Hello) {
      peer.hello = true;
      send(id, peer, {0, MessageKind::SceneSnapshot, session.snapshot()});
      return;
    }
    if (msg.kind != MessageKind::Command && msg.kind != MessageKind::MarkerMove) {
      send_error(id, peer, msg.seq, "ProtocolError", "clients may not send " + std::string(to_string(msg.kind)));
      return;
    }
    if (!peer.hello) {
      send_error(id, peer, msg.seq, "ProtocolError", "Hello required first");
      return;
    }
    OperatorInput input;
    if (msg.kind == MessageKind::MarkerMove) {
      input.command = UserCommand::marker_move(msg.payload.at("du").get<double>(), msg.payload.at("dv").get<double>());
    } else {
      input = OperatorInput::from_json(msg.payload);
    }

    std::vector<json> events;
    try {
      auto token = stop_source.get_token();
      events = std::async(std::launch::async, [&] { return session.handle(input, token); }).get();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Cancelled) return;
      send_error(id, peer, msg.seq, to_string(e.code()), e.what());
      publish();
      return;
    }

    std::optional<std::string> ignored;
    bool changed = false;
    for (const auto& ev : events) {
      const std::string type = ev.at("event").get<std::string>();
      if (type == "menu") {
        send(id, peer, {0, MessageKind::MenuUpdate, {{"clock", ev.at("clock")}, {"menu", ev.at("menu")}}});
      } else if (type == "phase") {
        send(id, peer,
             {0, MessageKind::PhaseUpdate, {{"clock", ev.at("clock")}, {"from", ev.at("from")}, {"to", ev.at("to")}}});
      } else if (type == "status") {
        send(id, peer, {0, MessageKind::RobotStatus, status_payload(ev)});
      } else if (type == "result") {
        send(id, peer, {0, MessageKind::TrialResult, {{"record", ev.at("record")}}});
      } else if (type == "outcome" || type == "jog") {
        changed = true;
      } else if (type == "ignored") {
        ignored = ev.at("reason").get<std::string>();
      }
    }
    if (changed) send(id, peer, {0, MessageKind::SceneSnapshot, session.snapshot()});
    if (ignored) {
      send_error(id, peer, msg.seq, "InvalidState", *ignored);
    } else {
      send(id, peer, make_ack(0, msg.seq));
    }
    publish();
  }
};

Server::Server(ExperimentConfig config, TrialSpec spec, Mode mode, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(spec), mode, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  if (s.started) throw Error(ErrorCode::InvalidState, "server already started");
  s.listen(s.tcp_acceptor, s.options.port);
  s.bound_port = s.tcp_acceptor.local_endpoint().port();
  if (s.options.ws_port) {
    s.listen(s.ws_acceptor, *s.options.ws_port);
    s.bound_ws_port = s.ws_acceptor.local_endpoint().port();
  }
  s.work.emplace(s.ioc.get_executor());
  s.accept<TcpConn>(s.tcp_acceptor);
  if (s.options.ws_port) s.accept<WsConn>(s.ws_acceptor);
  s.started = true;
  s.net_thread = std::thread([&s] { s.ioc.run(); });
  s.loop_thread = std::thread([&s] { s.loop(); });
}

void Server::stop() {
  Impl& s = *impl_;
  if (!s.started || s.stopped) return;
  s.stopped = true;
  s.stop_source.request_stop();
  s.inbox.push({Inbound::Type::Shutdown, 0, {}});
  s.loop_thread.join();
  asio::post(s.ioc, [&s] {
    error_code ec;
    s.tcp_acceptor.close(ec);
    s.ws_acceptor.close(ec);
    auto conns = s.conns;
    for (auto& [id, c] : conns) c->force_close();
    s.work.reset();
  });
  s.net_thread.join();
}

unsigned short Server::port() const { return impl_->bound_port; }
std::optional<unsigned short> Server::ws_port() const { return impl_->bound_ws_port; }

bool Server::wait_finished(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->pub_mu);
  return impl_->pub_cv.wait_for(lock, timeout, [&] { return impl_->result.has_value(); });
}

std::optional<TrialRecord> Server::result() const {
  std::lock_guard lock(impl_->pub_mu);
  return impl_->result;
}

std::string Server::transcript() const {
  std::lock_guard lock(impl_->pub_mu);
  return impl_->transcript;
}

// ---------------------------------------------------------------------------

struct Client::Impl {
  asio::io_context ioc;
  Transport transport = Transport::Tcp;
  tcp::socket socket{ioc};
  websocket::stream<tcp::socket> ws{ioc};
  asio::streambuf line_buffer{kMaxLine};
  beast::flat_buffer frame_buffer;
  SeqCounter seq;
  bool closed = false;
};

Client::Client(const std::string& host, unsigned short port, Transport transport)
    : impl_(std::make_unique<Impl>()) {
  Impl& c = *impl_;
  c.transport = transport;
  try {
    tcp::resolver resolver(c.ioc);
    const auto endpoints = resolver.resolve(host, std::to_string(port));
    if (transport == Transport::Tcp) {
      asio::connect(c.socket, endpoints);
    } else {
      asio::connect(beast::get_lowest_layer(c.ws), endpoints);
      c.ws.handshake(host, "/");
      c.ws.text(true);
      c.ws.read_message_max(kMaxLine);
    }
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::IoError, "connect to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
}

Client::~Client() {
  if (impl_) close();
}
Client::Client(Client&&) noexcept = default;
Client& Client::operator=(Client&&) noexcept = default;

std::uint64_t Client::send(MessageKind kind, const json& payload) {
  const std::uint64_t seq = impl_->seq.next();
  send_raw(encode({seq, kind, payload}));
  return seq;
}

void Client::send_raw(const std::string& line) {
  std::string data = line;
  if (data.empty() || data.back() != '\n') data.push_back('\n');
  try {
    if (impl_->transport == Transport::Tcp) {
      asio::write(impl_->socket, asio::buffer(data));
    } else {
      impl_->ws.write(asio::buffer(data));
    }
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::IoError, std::string("send: ") + e.what());
  }
}

Message Client::receive() {
  Impl& c = *impl_;
  std::string line;
  try {
    if (c.transport == Transport::Tcp) {
      const std::size_t n = asio::read_until(c.socket, c.line_buffer, '\n');
      auto begin = asio::buffers_begin(c.line_buffer.data());
      line.assign(begin, begin + static_cast<std::ptrdiff_t>(n));
      c.line_buffer.consume(n);
    } else {
      c.ws.read(c.frame_buffer);
      line = beast::buffers_to_string(c.frame_buffer.data());
      c.frame_buffer.consume(c.frame_buffer.size());
    }
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::IoError, std::string("receive: ") + e.what());
  }
  return decode(line);
}

void Client::close() {
  Impl& c = *impl_;
  if (c.closed) return;
  c.closed = true;
  error_code ec;
  if (c.transport == Transport::Tcp) {
    c.socket.shutdown(tcp::socket::shutdown_both, ec);
    c.socket.close(ec);
  } else {
    beast::get_lowest_layer(c.ws).close(ec);
  }
}

ClientRun run_client(const std::string& host, unsigned short port, const std::vector<OperatorInput>& log,
                     Transport transport) {
  Client client(host, port, transport);
  ClientRun run;
  client.send(MessageKind::Hello, {{"client", "assist"}});
  for (;;) {
    Message m = client.receive();
    run.received.push_back(m);
    if (m.kind == MessageKind::SceneSnapshot) break;
    if (m.kind == MessageKind::Error) {
      throw Error(ErrorCode::ProtocolError, "server refused: " + m.payload.at("message").get<std::string>());
    }
  }
  for (const auto& input : log) {
    std::uint64_t seq;
    if (input.command && input.command->kind == CommandKind::MarkerMove) {
      seq = client.send(MessageKind::MarkerMove, {{"du", input.command->du}, {"dv", input.command->dv}});
    } else {
      seq = client.send(MessageKind::Command, input.to_json());
    }
    for (;;) {
      Message m = client.receive();
      run.received.push_back(m);
      if (m.kind == MessageKind::TrialResult) run.record = record_from_json(m.payload.at("record"));
      const bool acked = m.kind == MessageKind::Ack || m.kind == MessageKind::Error;
      if (acked && m.payload.value("ref_seq", json()) == json(seq)) break;
    }
    if (run.record) break;
  }
  client.close();
  return run;
}

}  // namespace assist
