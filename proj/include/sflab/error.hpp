#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sflab {

enum class ErrorCode {
  // Input and validation failures (CLI exit code 2).
  DimensionMismatch,
  HermiticityViolation,
  EmptyModel,
  DuplicateHopping,
  FileNotFound,
  ParseError,
  InvalidParameter,
  InvalidFilter,
  TooFewSites,
  BadWeight,
  Gapless,
  RankJump,
  SymbolNotInvertible,
  SingularSymbol,
  // Numerical ambiguity; resolvable by refining the discretization (exit code 3).
  RefinementNeeded,
  SingularLink,
  IndeterminateLocalization,
  AmbiguousCluster,
  AmbiguousSide,
};

/// snake_case name used in machine-readable error reports.
std::string_view error_name(ErrorCode code);

/// True for errors that signal under-resolved numerics rather than bad input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace sflab
