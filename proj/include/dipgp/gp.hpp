#pragma once

// Dipolar Gross–Pitaevskii and Hartree energies on a BoxGrid.
//
// E(u) = ∫|(∇+iA)u|^2 + ∫V|u|^2 + (a/2)∫|u|^4 + (b/2)∫(K⋆|u|^2)|u|^2.
// The gradient g = hu + a|u|^2 u + b(K⋆|u|^2)u is half the Fréchet derivative
// in ū, and μ = <u, g>. The Hartree energy reuses the same machinery with
// a = 0, b = 1 and the multiplier ŵ_N; its pair term is reported as "dipolar".

#include <optional>
#include <string_view>

#include "dipgp/grid.hpp"
#include "dipgp/kernel.hpp"
#include "dipgp/potentials.hpp"

namespace dipgp {

enum class Classification { Stable, Borderline, Unstable };
std::string_view to_string(Classification c);

Classification classify(double a, double b, Extrema extrema, double tol = 1e-9);

struct InteractionSpec {
  double a = 0.0;
  double b = 0.0;
  std::optional<AngularSymbol> symbol;
  MultiplierGrid kernel;  // empty values: no nonlocal term
  Extrema extrema;
  Classification classification = Classification::Stable;
  bool pair_potential = false;
};

InteractionSpec make_interaction(const BoxGrid& grid, double a, double b,
                                 const AngularSymbol& omega, int n_directions = 2000);
InteractionSpec contact_interaction(const BoxGrid& grid, double a);
// ½∫(w⋆ρ)ρ as a = 0, b = 1, kernel = ŵ on the lattice. Classified Stable when
// ŵ ≥ -1e-12 on the lattice, Unstable otherwise.
InteractionSpec pair_interaction(const BoxGrid& grid, const PairPotential& w);
// Same interaction on another grid (multiplier resampled).
InteractionSpec rebind(const InteractionSpec& spec, const BoxGrid& grid);

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double contact = 0.0;
  double dipolar = 0.0;
  double total = 0.0;
};

struct Evaluation {
  EnergyBreakdown energy;
  Field gradient;  // empty unless requested
  double mu = 0.0;
  double conv_imag_residual = 0.0;
};

// Trap and interaction sampled once on a grid; reused across solver iterations.
class GPProblem {
 public:
  GPProblem(const BoxGrid& grid, const TrapSpec& trap, const InteractionSpec& spec);

  const BoxGrid& grid() const { return grid_; }
  const InteractionSpec& spec() const { return spec_; }
  bool has_gauge() const { return !A_[0].empty(); }
  const std::vector<double>& potential_samples() const { return V_; }

  // No normalization check; the caller decides.
  Evaluation evaluate(const Field& u, bool with_gradient) const;
  double mu_of(const Field& u, const Field& gradient) const;

 private:
  BoxGrid grid_;
  InteractionSpec spec_;
  std::vector<double> V_;
  std::array<std::vector<double>, 3> A_;
  std::vector<double> ksq_;                // |k̃|^2 / M^3
  std::array<std::vector<double>, 3> kj_;  // k̃_j / M^3
};

EnergyBreakdown gp_energy(const Field& u, const TrapSpec& trap, const InteractionSpec& spec);
Field gp_gradient(const Field& u, const TrapSpec& trap, const InteractionSpec& spec);
double chemical_potential(const Field& u, const TrapSpec& trap, const InteractionSpec& spec);

double hartree_energy(const Field& u, const TrapSpec& trap, const PairPotential& w_N);
// |½∫(w_N⋆ρ)ρ - (a/2)∫ρ^2 - (b/2)∫(K⋆ρ)ρ|, ρ = |u|^2, w_N = scale_potential(w, scaling).
double hartree_gp_gap(const Field& u, const PairPotential& w, HartreeScaling scaling,
                      const InteractionSpec& spec);

// ‖g - μu‖_{L^2}; requires A = 0.
double elgl_residual(const Field& u, const TrapSpec& trap, const InteractionSpec& spec);

// ½(2π)^-3 ∫(a + bK̂)|ρ̂|^2 as a lattice sum, ρ = |u|^2: the interaction energy.
double interaction_energy(const Field& u, const InteractionSpec& spec);

void require_normalized(const Field& u, double tol = 1e-8);

}  // namespace dipgp
