#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace assist {

enum class ErrorCode {
  InvalidArgument,
  FrameMismatch,
  InvalidDepth,
  DegenerateConfiguration,
  BehindCamera,
  ParallelRay,
  PlacementFailure,
  UnknownObject,
  EmptyCrop,
  EmptyInput,
  DegenerateCluster,
  NoFeasibleGrasp,
  UnreachableGoal,
  Timeout,
  StartInCollision,
  Cancelled,
  InvalidState,
  NoHeldObject,
  ParseError,
  ConfigError,
  ProtocolError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace assist
