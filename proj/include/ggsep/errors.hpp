#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ggsep {

enum class ErrorCode {
  // input / parse
  ParseError,
  NotSymmetric,
  DimensionMismatch,
  InvalidParameters,
  // math domain
  NotPositiveDefinite,
  EmptyIndexSet,
  SameVertex,
  IndexOutOfRange,
  IndexOverlap,
  NoEdges,
  NoMissingEdge,
  InfeasibleStart,
  InvalidDiagonal,
  InvalidCandidates,
  AllFitsFailed,
  // optimizer
  DidNotConverge,
};

std::string_view to_string(ErrorCode code);

/// Broad classes used to map errors onto process exit codes.
enum class ErrorCategory { Input, MathDomain, Convergence };

ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace ggsep
