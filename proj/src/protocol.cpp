#include "assist/protocol.hpp"

#include <array>
#include <cmath>

#include "assist/intent.hpp"
#include "assist/session.hpp"

namespace assist {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<MessageKind, std::string_view>, 10> kKindNames = {{
    {MessageKind::Hello, "Hello"},
    {MessageKind::SceneSnapshot, "SceneSnapshot"},
    {MessageKind::MenuUpdate, "MenuUpdate"},
    {MessageKind::PhaseUpdate, "PhaseUpdate"},
    {MessageKind::Command, "Command"},
    {MessageKind::MarkerMove, "MarkerMove"},
    {MessageKind::RobotStatus, "RobotStatus"},
    {MessageKind::TrialResult, "TrialResult"},
    {MessageKind::Error, "Error"},
    {MessageKind::Ack, "Ack"},
}};

[[noreturn]] void bad(MessageKind kind, const std::string& what) {
  throw Error(ErrorCode::ProtocolError, std::string(to_string(kind)) + " payload: " + what);
}

const json& field(MessageKind kind, const json& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end()) bad(kind, std::string("missing '") + key + "'");
  return *it;
}

double number(MessageKind kind, const json& p, const char* key) {
  const json& v = field(kind, p, key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) bad(kind, std::string("'") + key + "' must be a finite number");
  return v.get<double>();
}

void count(MessageKind kind, const json& p, const char* key) {
  if (!field(kind, p, key).is_number_unsigned()) bad(kind, std::string("'") + key + "' must be a non-negative integer");
}

void text(MessageKind kind, const json& p, const char* key) {
  if (!field(kind, p, key).is_string()) bad(kind, std::string("'") + key + "' must be a string");
}

void phase(MessageKind kind, const json& p, const char* key) {
  text(kind, p, key);
  try {
    phase_from_string(p.at(key).get<std::string>());
  } catch (const Error&) {
    bad(kind, std::string("'") + key + "' is not a task phase");
  }
}

void menu(MessageKind kind, const json& m) {
  if (!m.is_object()) bad(kind, "'menu' must be an object");
  if (!field(kind, m, "items").is_array()) bad(kind, "'menu.items' must be an array");
  if (!field(kind, m, "highlighted").is_number_integer()) bad(kind, "'menu.highlighted' must be an integer");
  for (const auto& item : m.at("items")) {
    if (!item.is_object() || !item.contains("id") || !item.contains("label")) bad(kind, "malformed menu item");
  }
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

MessageKind message_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::ParseError, "unknown message kind '" + std::string(name) + "'");
}

void validate_payload(MessageKind kind, const json& p) {
  if (!p.is_object()) bad(kind, "must be an object");
  switch (kind) {
    case MessageKind::Hello:
      if (p.contains("client") && !p.at("client").is_string()) bad(kind, "'client' must be a string");
      break;
    case MessageKind::SceneSnapshot:
      phase(kind, p, "phase");
      number(kind, p, "clock");
      if (!field(kind, p, "scene").is_object()) bad(kind, "'scene' must be an object");
      if (!field(kind, p, "robot").is_object()) bad(kind, "'robot' must be an object");
      menu(kind, field(kind, p, "menu"));
      break;
    case MessageKind::MenuUpdate:
      number(kind, p, "clock");
      menu(kind, field(kind, p, "menu"));
      break;
    case MessageKind::PhaseUpdate:
      number(kind, p, "clock");
      phase(kind, p, "from");
      phase(kind, p, "to");
      break;
    case MessageKind::Command: {
      OperatorInput in;
      try {
        in = OperatorInput::from_json(p);
      } catch (const Error& e) {
        bad(kind, e.what());
      }
      if (in.command && in.command->kind == CommandKind::MarkerMove) bad(kind, "marker moves use MarkerMove");
      break;
    }
    case MessageKind::MarkerMove:
      number(kind, p, "du");
      number(kind, p, "dv");
      break;
    case MessageKind::RobotStatus: {
      if (number(kind, p, "clock") < 0) bad(kind, "'clock' must be non-negative");
      count(kind, p, "segment");
      count(kind, p, "waypoint");
      count(kind, p, "waypoints");
      const json& tcp = field(kind, p, "tcp");
      if (!tcp.is_array() || tcp.size() != 3) bad(kind, "'tcp' must have 3 numbers");
      for (const auto& v : tcp) {
        if (!v.is_number()) bad(kind, "'tcp' must have 3 numbers");
      }
      break;
    }
    case MessageKind::TrialResult:
      try {
        record_from_json(field(kind, p, "record"));
      } catch (const Error& e) {
        bad(kind, e.what());
      } catch (const json::exception& e) {
        bad(kind, e.what());
      }
      break;
    case MessageKind::Error:
      text(kind, p, "code");
      text(kind, p, "message");
      if (p.contains("ref_seq") && !p.at("ref_seq").is_null() && !p.at("ref_seq").is_number_unsigned()) {
        bad(kind, "'ref_seq' must be a non-negative integer or null");
      }
      break;
    case MessageKind::Ack:
      count(kind, p, "ref_seq");
      break;
  }
}

std::string encode(const Message& msg) {
  validate_payload(msg.kind, msg.payload);
  json j;
  j["v"] = kProtocolVersion;
  j["seq"] = msg.seq;
  j["kind"] = std::string(to_string(msg.kind));
  j["payload"] = msg.payload;
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

Message decode(std::string_view line) {
  const std::string original(line);
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), original);
  }
  try {
    if (!j.is_object()) throw ParseError("message must be a JSON object", original);
    if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<long long>() != kProtocolVersion) {
      throw ParseError("unsupported schema version", original);
    }
    if (!j.contains("seq") || !j["seq"].is_number_unsigned()) throw ParseError("'seq' must be a non-negative integer", original);
    if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError("'kind' must be a string", original);
    if (!j.contains("payload")) throw ParseError("missing 'payload'", original);
    Message m;
    m.seq = j["seq"].get<std::uint64_t>();
    m.kind = message_kind_from_string(j["kind"].get<std::string>());
    m.payload = j["payload"];
    validate_payload(m.kind, m.payload);
    return m;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), original);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), original);
  }
}

void SeqTracker::accept(std::uint64_t seq) {
  if (seq != next_) {
    throw Error(ErrorCode::ProtocolError,
                "expected seq " + std::to_string(next_) + ", got " + std::to_string(seq));
  }
  ++next_;
}

Message make_ack(std::uint64_t seq, std::uint64_t ref_seq) {
  return {seq, MessageKind::Ack, {{"ref_seq", ref_seq}}};
}

Message make_error(std::uint64_t seq, std::optional<std::uint64_t> ref_seq, std::string_view code,
                   std::string_view message) {
  json p{{"code", std::string(code)}, {"message", std::string(message)}};
  p["ref_seq"] = ref_seq ? json(*ref_seq) : json(nullptr);
  return {seq, MessageKind::Error, p};
}

}  // namespace assist
