#pragma once

#include <stdexcept>
#include <string>

namespace specnet {

enum class ErrorCode {
  RootFailure,
  AmbiguousContinuation,
  DegenerateBranch,
  TruncationMismatch,
  PrestokesViolation,
  CyclicCollision,
  PathTooClose,
  RadiusFailure,
  MatchFailure,
  Inconsistent,
  NotFound,
  Nontermination,
  ParseError,
  ValidationError,
};

const char* error_code_name(ErrorCode code);

// All library failures carry a machine-readable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::RootFailure: return "ROOT_FAILURE";
    case ErrorCode::AmbiguousContinuation: return "AMBIGUOUS_CONTINUATION";
    case ErrorCode::DegenerateBranch: return "DEGENERATE_BRANCH";
    case ErrorCode::TruncationMismatch: return "TRUNCATION_MISMATCH";
    case ErrorCode::PrestokesViolation: return "PRESTOKES_VIOLATION";
    case ErrorCode::CyclicCollision: return "CYCLIC_COLLISION";
    case ErrorCode::PathTooClose: return "PATH_TOO_CLOSE";
    case ErrorCode::RadiusFailure: return "RADIUS_FAILURE";
    case ErrorCode::MatchFailure: return "MATCH_FAILURE";
    case ErrorCode::Inconsistent: return "INCONSISTENT";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Nontermination: return "NONTERMINATION";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace specnet
