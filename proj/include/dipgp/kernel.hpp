#pragma once

// Angular symbols Ω on the unit sphere and the Fourier multiplier of
// K(x) = Ω(x/|x|)/|x|^3.

#include <atomic>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "dipgp/vec3.hpp"

namespace dipgp {

inline constexpr int kDefaultQuadOrder = 50;
inline constexpr int kCancellationOrder = 30;
inline constexpr double kCancellationTol = 1e-8;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class AngularSymbol {
 public:
  enum class Kind { Dipolar, Zonal, General };
  using Fn = std::function<double(const Vec3&)>;

  // Ω(ω) = 1 - 3(n·ω)^2.
  static AngularSymbol dipolar(Vec3 n);
  // Ω(ω) = Σ_j c_j (n·ω)^j.
  static AngularSymbol zonal(Vec3 n, std::vector<double> coeffs);
  // Arbitrary callable. Evenness is probed on a direction sample (tolerance 1e-12).
  static AngularSymbol general(Fn fn, Vec3 axis = kE3);

  double operator()(const Vec3& omega) const;

  Kind kind() const { return kind_; }
  const Vec3& axis() const { return axis_; }
  bool is_even() const { return is_even_; }
  // Polynomial coefficients in n·ω; empty for General symbols.
  const std::vector<double>& zonal_coefficients() const { return coeffs_; }
  // Result of the last check_cancellation on this object (NaN before any check).
  double cancellation_residual() const { return residual_->load(); }

 private:
  friend double check_cancellation(const AngularSymbol& omega, int quad_order);

  Kind kind_ = Kind::General;
  Vec3 axis_ = kE3;
  bool is_even_ = true;
  std::vector<double> coeffs_;
  Fn fn_;
  std::shared_ptr<std::atomic<double>> residual_ =
      std::make_shared<std::atomic<double>>(std::numeric_limits<double>::quiet_NaN());
};

inline AngularSymbol dipolar_symbol(Vec3 n) { return AngularSymbol::dipolar(n); }

// Spherical quadrature of ∫Ω dσ; also recorded as the symbol's cancellation_residual.
double check_cancellation(const AngularSymbol& omega, int quad_order);

// (4π/3)(3 cos^2 θ_k - 1).
double khat_closed_dipolar(Vec3 k, Vec3 n);

// -∫ log|k̂·ω| Ω(ω) dσ(ω).
double khat_quadrature(const AngularSymbol& omega, Vec3 k, int quad_order = kDefaultQuadOrder);

// ∫_{S^2} ∫_R^{R'} cos(r k·ω)/r Ω dr dσ; R' may be kInfinity.
double khat_truncated(const AngularSymbol& omega, Vec3 k, double R, double R_prime,
                      int quad_order = kDefaultQuadOrder);

struct Extrema {
  double inf = 0.0;
  double sup = 0.0;
};

// Min/max of K̂ over Fibonacci directions plus ±axis and two axis-orthogonal directions.
Extrema khat_extrema(const AngularSymbol& omega, int n_directions);

// Quasi-uniform deterministic points on the unit sphere.
std::vector<Vec3> fibonacci_sphere(int n);

// Cin(x) = ∫_0^x (1 - cos t)/t dt.
double cin(double x);

// K̂ of a zonal symbol as a function of c = n·k̂. Exact for polynomial symbols:
// the multiplier is a polynomial in c of the same degree, so it is interpolated
// from quadrature values at Chebyshev nodes.
class ZonalMultiplier {
 public:
  explicit ZonalMultiplier(const AngularSymbol& omega, int quad_order = kDefaultQuadOrder);
  double operator()(double c) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> weights_;
};

}  // namespace dipgp
