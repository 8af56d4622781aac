#include "ncet/error.hpp"

namespace ncet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::AmbiguousClustering: return "AmbiguousClustering";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::NotCyclic: return "NotCyclic";
    case ErrorCode::NotSeparating: return "NotSeparating";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::TrivialPair: return "TrivialPair";
    case ErrorCode::NoEigenoperator: return "NoEigenoperator";
    case ErrorCode::NotInSpan: return "NotInSpan";
    case ErrorCode::NotAbelian: return "NotAbelian";
    case ErrorCode::NotCentral: return "NotCentral";
    case ErrorCode::BlockNotErgodic: return "BlockNotErgodic";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::WindowExceeded: return "WindowExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidSystem:
    case ErrorCode::NonFinite:
    case ErrorCode::TrivialPair:
    case ErrorCode::TooShort:
      return 2;
    case ErrorCode::NotCyclic:
    case ErrorCode::NotSeparating:
    case ErrorCode::HypothesisViolation:
    case ErrorCode::NoEigenoperator:
    case ErrorCode::NotInSpan:
    case ErrorCode::NotAbelian:
    case ErrorCode::NotCentral:
    case ErrorCode::BlockNotErgodic:
    case ErrorCode::WindowExceeded:
      return 3;
    case ErrorCode::NotNormal:
    case ErrorCode::NoConvergence:
    case ErrorCode::NotUnimodular:
    case ErrorCode::AmbiguousClustering:
    case ErrorCode::NumericalFailure:
    case ErrorCode::DimensionOverflow:
      return 4;
  }
  return 4;
}

}  // namespace ncet
