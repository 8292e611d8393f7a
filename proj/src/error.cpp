#include "dlaw/error.hpp"

namespace dlaw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidMask: return "InvalidMask";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::AliasedFrequency: return "AliasedFrequency";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::CorruptArtifact: return "CorruptArtifact";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RootFindingDiverged: return "RootFindingDiverged";
    case ErrorCode::NonRealCoefficients: return "NonRealCoefficients";
    case ErrorCode::ZeroRoot: return "ZeroRoot";
    case ErrorCode::UnstableOverflow: return "UnstableOverflow";
    case ErrorCode::UnstableBasis: return "UnstableBasis";
    case ErrorCode::SingularNormalMatrix: return "SingularNormalMatrix";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::RootFindingDiverged:
    case ErrorCode::NonRealCoefficients:
    case ErrorCode::ZeroRoot:
    case ErrorCode::UnstableOverflow:
    case ErrorCode::UnstableBasis:
    case ErrorCode::SingularNormalMatrix:
      return true;
    default:
      return false;
  }
}

}  // namespace dlaw
