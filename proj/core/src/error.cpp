#include "llob/error.hpp"

namespace llob {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::InconsistentCurrent: return "InconsistentCurrent";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::DivergentDeposition: return "DivergentDeposition";
    case ErrorCode::PriceEscapedGrid: return "PriceEscapedGrid";
    case ErrorCode::NonUniqueZeroCrossing: return "NonUniqueZeroCrossing";
    case ErrorCode::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::FixedPointDivergence: return "FixedPointDivergence";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::RootFindFailure: return "RootFindFailure";
    case ErrorCode::StationaryPriceSingularity: return "StationaryPriceSingularity";
    case ErrorCode::SignChange: return "SignChange";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::NoReturnWithinHorizon: return "NoReturnWithinHorizon";
    case ErrorCode::InvariantBreach: return "InvariantBreach";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace llob
