#include "demi/errors.hpp"

namespace demi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ValueOutOfBounds: return "ValueOutOfBounds";
    case ErrorCode::EmptyDensity: return "EmptyDensity";
    case ErrorCode::ZeroArgument: return "ZeroArgument";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotInResolventSet: return "NotInResolventSet";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonPositiveIterate: return "NonPositiveIterate";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::GridIncompatibility: return "GridIncompatibility";
    case ErrorCode::InsufficientLayerNodes: return "InsufficientLayerNodes";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace demi
