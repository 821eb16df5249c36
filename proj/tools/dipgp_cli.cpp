// Command-line front end: dipgp run <config> | validate <config> | version

#include <iostream>

#include "CLI11.hpp"

#include "dipgp/run.hpp"
#include "dipgp/simd.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dipolar Gross-Pitaevskii ground states, stability probes and kernel tables"};
  app.require_subcommand(1);

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "Execute the run described by an INI config");
  run_cmd->add_option("config", config, "Config file")->required();
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config");
  validate_cmd->add_option("config", config, "Config file")->required();
  auto* version_cmd = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dipgp::kExitValidation;
  }

  if (version_cmd->parsed()) {
    std::cout << "dipgp " << dipgp::kVersion << " (simd: "
              << dipgp::simd::backend_name(dipgp::simd::active_backend()) << ")\n";
    return 0;
  }
  if (validate_cmd->parsed()) return dipgp::validate(config, std::cout, std::cerr);
  return dipgp::run(config, std::cout, std::cerr);
}
