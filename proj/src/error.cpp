#include "dipgp/error.hpp"

namespace dipgp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidAxis: return "InvalidAxis";
    case ErrorCode::SingularOrigin: return "SingularOrigin";
    case ErrorCode::NonCancelingSymbol: return "NonCancelingSymbol";
    case ErrorCode::EmptyShell: return "EmptyShell";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NoLimit: return "NoLimit";
    case ErrorCode::NoRealSpaceForm: return "NoRealSpaceForm";
    case ErrorCode::GaugeNotSupported: return "GaugeNotSupported";
    case ErrorCode::RefusedUnstable: return "RefusedUnstable";
    case ErrorCode::RefusedStable: return "RefusedStable";
    case ErrorCode::ResolutionExceeded: return "ResolutionExceeded";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::AtLeastThreePoints: return "AtLeastThreePoints";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace dipgp
