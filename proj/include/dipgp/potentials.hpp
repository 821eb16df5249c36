#pragma once

// Microscopic pair potentials, traps and mean-field scaling.
//
// Fourier transforms use f̂(k) = ∫ f(x) e^{-ik·x} dx unless noted.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dipgp/vec3.hpp"

namespace dipgp {

using RealFn = std::function<double(const Vec3&)>;

struct PairPotential {
  RealFn eval_real;      // may be empty
  RealFn eval_fourier;   // may be empty
  double dipole_strength = 0.0;      // d
  double dipolar_coefficient = 0.0;  // b of the far field b·K_dip: d^2, or -d^2 for wtilde_dip
  Vec3 axis = kE3;
  double cutoff_R = 0.0;
  bool positive_type = false;
  std::string description;

  bool has_real() const { return static_cast<bool>(eval_real); }
  bool has_fourier() const { return static_cast<bool>(eval_fourier); }
};

// W(x) = (1 - e^{-|x|})/|x|, W(0) = 1.
double smeared_coulomb(Vec3 x);
double smeared_coulomb_radial(double r);

// 2W(x) - W(x + d n) - W(x - d n)
double w_dip(Vec3 x, double d, Vec3 n);
// 8π(1 - cos(d k·n))/(|k|^2 (1 + |k|^2)); 4πd^2/3 at k = 0.
double w_dip_hat(Vec3 k, double d, Vec3 n);
// f̂(k) - ŵ_dip(k) with f̂ = 4π/((1+|k|^2)(d^-2 + (k1^2+k2^2)/4)), axis e3; 8πd^2/3 at k = 0.
double wtilde_dip(Vec3 k, double d);

// μ(e^{-λ|x|/2} - e^{-λ|x|})/|x|
double stabilizer_psi(Vec3 x, double mu, double lambda);
// (3/4)λ^2 μ/((|k|^2 + λ^2/4)(|k|^2 + λ^2)). This is the e^{-ik·x} transform
// divided by 4π.
double stabilizer_psi_hat(Vec3 k, double mu, double lambda);

PairPotential make_w_dip(double d, Vec3 n = kE3);
PairPotential make_wtilde_dip(double d);
// mass * (2πσ^2)^{-3/2} e^{-|x|^2/(2σ^2)}, transform mass * e^{-σ^2|k|^2/2}.
PairPotential make_gaussian(double mass, double sigma);
// w_dip + Gaussian.
PairPotential make_composite(double d, Vec3 n, double mass, double sigma);
PairPotential make_stabilizer(double mu, double lambda);
PairPotential zero_potential();

struct HartreeScaling {
  double beta = 0.0;
  long N = 1;
};

// Upper end of the admissible β range for trap growth exponent s.
double beta_threshold(double s);

// w_N(x) = N^{3β} w(N^β x), ŵ_N(k) = ŵ(k/N^β).
PairPotential scale_potential(const PairPotential& w, HartreeScaling scaling);

// lim_{p→0} [ŵ(p) - b K̂_dip(p)] by Richardson extrapolation along (1,1,1)/√3.
double short_range_strength_b(const RealFn& w_hat, double b, Vec3 n = kE3);
// Same with b = d^2.
double short_range_strength(const RealFn& w_hat, double d, Vec3 n = kE3);

struct StabilityProbeResult {
  double min_energy_per_particle = 0.0;
  // -N w(0)/2, the positive-type lower bound on Σ_{i<j} w.
  double positive_type_bound = 0.0;
  bool bound_applies = false;
  long violations = 0;
  long trials = 0;
  std::string worst_configuration;
};

StabilityProbeResult classical_stability_probe(const PairPotential& w, int N, long trials,
                                               double box, std::uint64_t seed = 1);

struct TrapSpec {
  RealFn V;
  std::function<Vec3(const Vec3&)> A;  // empty means A = 0
  double growth_exponent = 2.0;
  std::string description;

  bool has_gauge() const { return static_cast<bool>(A); }
};

// V = Σ_i ω_i^2 x_i^2.
TrapSpec harmonic_trap(Vec3 omega2 = {1.0, 1.0, 1.0});
// V = κ|x|^4.
TrapSpec quartic_trap(double kappa);
// Adds A = (Ω/2)(-y, x, 0).
TrapSpec with_rotation(TrapSpec trap, double omega_rot);

// Checks V(x) ≥ (|A|^2 + |x|^s)/C - C on the given points.
bool trap_growth_holds(const TrapSpec& trap, double C, const std::vector<Vec3>& points);

}  // namespace dipgp
