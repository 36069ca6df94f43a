#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sleepwake {

enum class ErrorCode {
  // ingest
  IoError,
  MissingColumn,
  MalformedRow,
  BadTimestamp,
  NonMonotonicTimestamps,
  TimestampGap,
  WrongEpochLength,
  NegativeCount,
  EmptySeries,
  // stc
  DomainError,
  NonVaryingSeries,
  NoConvergence,
  ConstantCurve,
  // cpd
  NonPositiveSample,
  ZeroVariance,
  NoChangePointFound,
  RegionTooShort,
  // detect
  TooFewTransitions,
  NonAlternatingKinds,
  LengthMismatch,
  // eval
  TooShort,
  ZeroVarianceDifferences,
  TooFewSubjects,
  // synth / app
  InvalidConfig,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sleepwake
