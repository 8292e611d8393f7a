#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlaw {

enum class ErrorCode {
  // input / data errors
  InvalidArgument,
  SeriesTooShort,
  InvalidMask,
  DimensionMismatch,
  ZeroSignal,
  AliasedFrequency,
  UnsupportedFormat,
  MalformedHeader,
  CorruptArtifact,
  BadMagic,
  UnsupportedVersion,
  TruncatedPayload,
  InvariantViolation,
  IoError,
  // numerical failures
  NoConvergence,
  RootFindingDiverged,
  NonRealCoefficients,
  ZeroRoot,
  UnstableOverflow,
  UnstableBasis,
  SingularNormalMatrix,
};

std::string_view to_string(ErrorCode code);

/// True for failures of a numerical procedure (as opposed to bad input).
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the error-code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace dlaw
