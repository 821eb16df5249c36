#pragma once

// Run configuration: an INI file with [run], [grid], [trap], [interaction],
// [solver], [kernel_table], [probe] and [audit] sections. See docs/config.md.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dipgp/kernel.hpp"
#include "dipgp/minimize.hpp"
#include "dipgp/potentials.hpp"

namespace dipgp {

enum class Mode { GroundState, HartreeStudy, InstabilityProbe, KernelTable, PotentialAudit };
std::string_view to_string(Mode m);

struct TrapConfig {
  std::string type = "harmonic";  // harmonic | anisotropic-harmonic | quartic
  double omega2 = 1.0;
  Vec3 omega2_axes{1.0, 1.0, 1.0};
  double kappa = 1.0;
  std::string gauge = "none";  // none | uniform-rotation
  double omega_rot = 0.0;
};

struct InteractionConfig {
  double a = 0.0;
  double b = 0.0;
  std::string symbol = "dipolar";  // dipolar | custom
  Vec3 axis = kE3;
  std::vector<double> coefficients;  // custom: Σ c_j (n·ω)^j
  std::string potential = "w_dip";   // w_dip | wtilde_dip | gaussian | composite | stabilizer | zero
  double d = 1.0;
  double beta = 0.25;
  std::vector<long> N_list{16, 64, 256, 1024};
  double gaussian_mass = 1.0;
  double gaussian_sigma = 1.0;
  double stabilizer_mu = 1.0;
  double stabilizer_lambda = 2.0;
};

struct KernelTableConfig {
  int directions = 64;
  int quad_order = kDefaultQuadOrder;
  int extrema_directions = 2000;
};

struct AuditConfig {
  int N = 16;
  long trials = 10000;
  double box = 10.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  Mode mode = Mode::GroundState;
  std::string output_dir = "dipgp-out";
  int M = 64;
  double L_box = 16.0;
  TrapConfig trap;
  InteractionConfig interaction;
  SolverConfig solver;
  KernelTableConfig kernel_table;
  ProbeParams probe;
  AuditConfig audit;

  std::string source_text;
  std::string source_name;
  // section -> key -> raw value, exactly as read
  std::map<std::string, std::map<std::string, std::string>> echo;
};

// Throws Error(ConfigError) with a "name:line: message" prefix on any problem.
RunConfig parse_config_text(const std::string& text, const std::string& name = "<config>");
RunConfig load_config(const std::string& path);

// Applies DIPGP_OUTPUT_DIR, creates the directory and checks it is writable.
std::string prepare_output_dir(const RunConfig& cfg);

TrapSpec build_trap(const RunConfig& cfg);
AngularSymbol build_symbol(const RunConfig& cfg);
PairPotential build_potential(const RunConfig& cfg);

}  // namespace dipgp
