#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "assist/error.hpp"

namespace assist {

inline constexpr int kProtocolVersion = 1;

enum class MessageKind {
  Hello,
  SceneSnapshot,
  MenuUpdate,
  PhaseUpdate,
  Command,
  MarkerMove,
  RobotStatus,
  TrialResult,
  Error,
  Ack,
};

std::string_view to_string(MessageKind kind);
// Throws ParseError for unknown names.
MessageKind message_kind_from_string(std::string_view name);

struct Message {
  std::uint64_t seq = 0;
  MessageKind kind = MessageKind::Hello;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Message& other) const {
    return seq == other.seq && kind == other.kind && payload == other.payload;
  }
};

// Decoding failure; keeps the offending line for diagnostics.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string line)
      : Error(ErrorCode::ParseError, message), line_(std::move(line)) {}
  const std::string& line() const noexcept { return line_; }

 private:
  std::string line_;
};

// Throws ProtocolError if the payload does not match the kind's schema.
void validate_payload(MessageKind kind, const nlohmann::json& payload);

// One JSON object per line: {"v":1,"seq":..,"kind":"..","payload":{..}}\n
std::string encode(const Message& msg);
// Accepts the line with or without its trailing newline (and a CR before it).
Message decode(std::string_view line);

// Per-direction sequence check: first seq is 1, then each one exactly +1.
class SeqTracker {
 public:
  // Throws ProtocolError on a gap or regression; the expected value is unchanged.
  void accept(std::uint64_t seq);
  std::uint64_t expected() const { return next_; }

 private:
  std::uint64_t next_ = 1;
};

class SeqCounter {
 public:
  std::uint64_t next() { return ++last_; }

 private:
  std::uint64_t last_ = 0;
};

Message make_ack(std::uint64_t seq, std::uint64_t ref_seq);
Message make_error(std::uint64_t seq, std::optional<std::uint64_t> ref_seq, std::string_view code,
                   std::string_view message);

}  // namespace assist
