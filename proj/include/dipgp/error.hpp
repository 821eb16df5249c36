#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dipgp {

enum class ErrorCode {
  InvalidAxis,
  SingularOrigin,
  NonCancelingSymbol,
  EmptyShell,
  GridMismatch,
  ZeroField,
  NotNormalized,
  NoLimit,
  NoRealSpaceForm,
  GaugeNotSupported,
  RefusedUnstable,
  RefusedStable,
  ResolutionExceeded,
  NumericalBreakdown,
  AtLeastThreePoints,
  InternalConsistency,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported as dipgp::Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dipgp
