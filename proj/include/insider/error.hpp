#pragma once

/// @file error.hpp
/// Error codes and the exception type shared by all insider modules.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace insider {

enum class ErrorCode {
  kInvalidIdentifier,
  kDuplicateName,
  kUnknownOwner,
  kUnknownPort,
  kDirectionViolation,
  kSelfConnection,
  kMultipleDrivers,
  kUnknownTarget,
  kNameCollision,
  kWouldViolateInvariant,
  kUnresolvedReference,
  kCrossComponentBeta,
  kIntraComponentConnection,
  kInvalidProbability,
  kMalformedExpression,
  kUnassignedReference,
  kUnknownElement,
  kDanglingTrace,
  kInvalidHints,
  kStaleChangeSet,
  kInapplicableOp,
  kUnknownKey,
  kInvalidComponent,
  kCyclicPropagation,
  kUndefinedOutportExpression,
  kNonCoherentTree,
  kTooLarge,
  kMissingProbability,
  kParseError,
  kSchemaError,
  kIoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidIdentifier: return "InvalidIdentifier";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kUnknownOwner: return "UnknownOwner";
    case ErrorCode::kUnknownPort: return "UnknownPort";
    case ErrorCode::kDirectionViolation: return "DirectionViolation";
    case ErrorCode::kSelfConnection: return "SelfConnection";
    case ErrorCode::kMultipleDrivers: return "MultipleDrivers";
    case ErrorCode::kUnknownTarget: return "UnknownTarget";
    case ErrorCode::kNameCollision: return "NameCollision";
    case ErrorCode::kWouldViolateInvariant: return "WouldViolateInvariant";
    case ErrorCode::kUnresolvedReference: return "UnresolvedReference";
    case ErrorCode::kCrossComponentBeta: return "CrossComponentBeta";
    case ErrorCode::kIntraComponentConnection: return "IntraComponentConnection";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kMalformedExpression: return "MalformedExpression";
    case ErrorCode::kUnassignedReference: return "UnassignedReference";
    case ErrorCode::kUnknownElement: return "UnknownElement";
    case ErrorCode::kDanglingTrace: return "DanglingTrace";
    case ErrorCode::kInvalidHints: return "InvalidHints";
    case ErrorCode::kStaleChangeSet: return "StaleChangeSet";
    case ErrorCode::kInapplicableOp: return "InapplicableOp";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kInvalidComponent: return "InvalidComponent";
    case ErrorCode::kCyclicPropagation: return "CyclicPropagation";
    case ErrorCode::kUndefinedOutportExpression:
      return "UndefinedOutportExpression";
    case ErrorCode::kNonCoherentTree: return "NonCoherentTree";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kMissingProbability: return "MissingProbability";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// One violation found while validating or applying something.
struct Issue {
  ErrorCode code;
  std::string message;

  friend bool operator==(const Issue&, const Issue&) = default;
};

/// The single exception type thrown by the library.
///
/// Validation is total: an Error raised by a validator carries every issue
/// found, and code() reports the first one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : Error(std::vector<Issue>{{code, message}}) {}

  explicit Error(std::vector<Issue> issues)
      : std::runtime_error(Summarize(issues)), issues_(std::move(issues)) {}

  ErrorCode code() const { return issues_.front().code; }
  const std::vector<Issue>& issues() const { return issues_; }

  bool has(ErrorCode code) const {
    return std::any_of(issues_.begin(), issues_.end(),
                       [code](const Issue& i) { return i.code == code; });
  }

 private:
  static std::string Summarize(const std::vector<Issue>& issues) {
    if (issues.empty()) throw std::logic_error("Error without issues");
    std::string text;
    for (const Issue& issue : issues) {
      if (!text.empty()) text += "\n";
      text += std::string(to_string(issue.code)) + ": " + issue.message;
    }
    return text;
  }

  std::vector<Issue> issues_;
};

/// Throws an Error holding @p issues unless the list is empty.
inline void ThrowIfAny(std::vector<Issue> issues) {
  if (!issues.empty()) throw Error(std::move(issues));
}

}  // namespace insider
