#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncet {

/// Failure categories surfaced by the library. The CLI maps them onto
/// exit codes (see `exit_code_for`).
enum class ErrorCode {
  // linear algebra
  NotNormal,
  NoConvergence,
  NotUnimodular,
  AmbiguousClustering,
  DimensionMismatch,
  NonFinite,
  NumericalFailure,
  // algebraic structure
  DimensionOverflow,
  InvalidSystem,
  NotCyclic,
  NotSeparating,
  HypothesisViolation,
  TrivialPair,
  NoEigenoperator,
  NotInSpan,
  NotAbelian,
  NotCentral,
  BlockNotErgodic,
  // counterexample
  TooShort,
  WindowExceeded,
  // front end
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// 0 success, 2 config error, 3 hypothesis violation, 4 numerical failure.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace ncet
