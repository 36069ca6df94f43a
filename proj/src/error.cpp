#include "sleepwake/error.hpp"

namespace sleepwake {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::TimestampGap: return "TimestampGap";
    case ErrorCode::WrongEpochLength: return "WrongEpochLength";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonVaryingSeries: return "NonVaryingSeries";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConstantCurve: return "ConstantCurve";
    case ErrorCode::NonPositiveSample: return "NonPositiveSample";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NoChangePointFound: return "NoChangePointFound";
    case ErrorCode::RegionTooShort: return "RegionTooShort";
    case ErrorCode::TooFewTransitions: return "TooFewTransitions";
    case ErrorCode::NonAlternatingKinds: return "NonAlternatingKinds";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ZeroVarianceDifferences: return "ZeroVarianceDifferences";
    case ErrorCode::TooFewSubjects: return "TooFewSubjects";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace sleepwake
