#pragma once

// Minimization on the L^2 unit sphere: projected gradient flow with
// Barzilai–Borwein steps and a monotone backtracking safeguard.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dipgp/gp.hpp"

namespace dipgp {

enum class StepRule { Fixed, AdaptiveBB };

struct SolverConfig {
  int max_iters = 20000;
  double step_init = 1e-3;
  double energy_tol = 1e-13;
  double residual_tol = 1e-7;
  StepRule step_rule = StepRule::AdaptiveBB;
  std::uint64_t seed = 0;
  double init_noise = 0.0;  // relative amplitude of seeded noise on the initial Gaussian
};

enum class Verdict { Converged, MaxIters, DivergedToCollapse };
std::string_view to_string(Verdict v);

struct HistoryRow {
  int iter = 0;
  EnergyBreakdown energy;
  double step = 0.0;
  double residual = 0.0;
};

struct SolverRun {
  Field final_state;
  std::vector<HistoryRow> history;
  int iterations = 0;
  Verdict verdict = Verdict::MaxIters;
  EnergyBreakdown energy;
  double mu = 0.0;
  double residual = 0.0;
  bool borderline = false;
  bool exploratory = false;
  std::vector<std::string> warnings;
};

using IterationObserver = std::function<void(const HistoryRow&)>;

// Product Gaussian whose per-axis widths minimize the trap energy of a
// separable trial state; multiplied by (1 + noise·ξ) with seeded ξ ~ N(0,1).
Field gaussian_init(const BoxGrid& grid, const TrapSpec& trap, std::uint64_t seed = 0,
                    double noise = 0.0);

SolverRun ground_state(const Field& init, const TrapSpec& trap, const InteractionSpec& spec,
                       const SolverConfig& cfg, const IterationObserver& observer = {});

SolverRun hartree_ground_state(const Field& init, const TrapSpec& trap, const PairPotential& w,
                               HartreeScaling scaling, const SolverConfig& cfg,
                               const IterationObserver& observer = {});

struct ProbeParams {
  int M = 64;
  double L_box = 16.0;
  bool adaptive_grid = true;   // evaluate φ_ℓ on a box shrunk by ℓ
  double target_energy = -1e3;
  int max_doublings = 30;
  long max_ell = 0;            // fixed-grid mode: largest requested ℓ
};

struct ProbeStep {
  double ell = 1.0;
  double L_box = 0.0;
  EnergyBreakdown energy;
};

struct ProbeResult {
  double lambda = 1.0;
  double aspect = 1.0;
  double depth = 0.0;          // -min(a + bK̂)
  double form = 0.0;           // <a + bK̂> weighted by |ρ̂|^2 for the chosen λ
  std::vector<std::pair<double, double>> squeezes;  // (λ, form) tried
  std::vector<ProbeStep> steps;
  double fitted_exponent = 0.0;
};

ProbeResult instability_probe(const TrapSpec& trap, const InteractionSpec& spec,
                              const ProbeParams& params = {});

struct StudyRow {
  long N = 0;
  double e_hartree = 0.0;
  double gap = 0.0;             // e_H - e_GP
  double interaction_gap = 0.0; // hartree_gp_gap at the GP minimizer
  Verdict verdict = Verdict::MaxIters;
  EnergyBreakdown energy;
};

struct StudyResult {
  double a = 0.0, b = 0.0;
  double e_gp = 0.0;
  SolverRun gp_run;
  std::vector<StudyRow> rows;
  double fitted_rate = 0.0;             // slope of log|e_H - e_GP| vs log N
  double fitted_interaction_rate = 0.0; // same for the interaction gap
};

StudyResult convergence_study(const Field& init, const TrapSpec& trap, const PairPotential& w,
                              double beta, const std::vector<long>& N_list,
                              const SolverConfig& cfg);

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dipgp
