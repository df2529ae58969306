#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace demi {

enum class ErrorCode {
  ValueOutOfBounds,
  EmptyDensity,
  ZeroArgument,
  UnsupportedVariant,
  DomainTooSmall,
  DimensionMismatch,
  GridMismatch,
  SingularSystem,
  NotInResolventSet,
  MaxIterations,
  NonPositiveIterate,
  ConvergenceFailure,
  SignViolation,
  PreconditionViolated,
  GridIncompatibility,
  InsufficientLayerNodes,
  InsufficientPoints,
  InvalidArgument,
  ConfigParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace demi
