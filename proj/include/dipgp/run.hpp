#pragma once

#include <ostream>
#include <string>
#include <string_view>

namespace dipgp {

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Executes a run described by an INI config; writes artifacts into the
// configured output directory and returns the process exit code.
int run(const std::string& config_path, std::ostream& out, std::ostream& err);

// Parses and validates only.
int validate(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace dipgp
