#pragma once

#include <stdexcept>
#include <string>

namespace mkit {

enum class ErrorCode {
  MalformedRecord,
  EmptyInput,
  RangeViolation,
  NonMonotonicTime,
  NonFiniteValue,
  EmptySeries,
  TooFewSamples,
  GridOutOfRange,
  MissingChannel,
  InsufficientOverlap,
  IoFailure,
  MissingFile,
  LabelUnknown,
  SingleClass,
  NoConvergence,
  DimensionMismatch,
  ClassTooSmall,
};

const char* to_string(ErrorCode code);

/// Domain error carrying a stable machine-readable code. The CLI prints
/// these as `error: <Code>: <message>` and exits 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace mkit
