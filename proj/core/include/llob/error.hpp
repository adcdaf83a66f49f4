#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace llob {

enum class ErrorCode {
  NonPositiveParameter,
  InconsistentCurrent,
  InvalidDistribution,
  InvalidSchedule,
  ParameterOutOfRange,
  DivergentDeposition,
  PriceEscapedGrid,
  NonUniqueZeroCrossing,
  NoZeroCrossing,
  InsufficientDepth,
  FixedPointDivergence,
  BracketFailure,
  QuadratureFailure,
  RootFindFailure,
  StationaryPriceSingularity,
  SignChange,
  NegativeRadicand,
  NoReturnWithinHorizon,
  InvariantBreach,
  UnknownExperiment,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace llob
