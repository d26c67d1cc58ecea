#include "assist/error.hpp"

namespace assist {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::FrameMismatch: return "frame-mismatch";
    case ErrorCode::InvalidDepth: return "invalid-depth";
    case ErrorCode::DegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::BehindCamera: return "behind-camera";
    case ErrorCode::ParallelRay: return "parallel-ray";
    case ErrorCode::PlacementFailure: return "placement-failure";
    case ErrorCode::UnknownObject: return "unknown-object";
    case ErrorCode::EmptyCrop: return "empty-crop";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::DegenerateCluster: return "degenerate-cluster";
    case ErrorCode::NoFeasibleGrasp: return "no-feasible-grasp";
    case ErrorCode::UnreachableGoal: return "unreachable-goal";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::StartInCollision: return "start-in-collision";
    case ErrorCode::Cancelled: return "cancelled";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::NoHeldObject: return "no-held-object";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::ConfigError: return "config-error";
    case ErrorCode::ProtocolError: return "protocol-error";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace assist
