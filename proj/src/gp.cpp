#include "dipgp/gp.hpp"

#include <algorithm>
#include <cmath>

#include "dipgp/error.hpp"
#include "dipgp/simd.hpp"

namespace dipgp {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Stable: return "Stable";
    case Classification::Borderline: return "Borderline";
    case Classification::Unstable: return "Unstable";
  }
  return "Unknown";
}

Classification classify(double a, double b, Extrema extrema, double tol) {
  if (b == 0.0) return a >= 0.0 ? Classification::Stable : Classification::Unstable;
  // a must dominate b(inf K̂)_- for b > 0 and -b(sup K̂)_+ for b < 0.
  const double threshold =
      b > 0.0 ? b * std::max(-extrema.inf, 0.0) : -b * std::max(extrema.sup, 0.0);
  const double margin = a - threshold;
  const double band = tol * std::max(1.0, std::abs(threshold));
  if (std::abs(margin) <= band) return Classification::Borderline;
  return margin > 0.0 ? Classification::Stable : Classification::Unstable;
}

InteractionSpec make_interaction(const BoxGrid& grid, double a, double b,
                                 const AngularSymbol& omega, int n_directions) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidArgument, "interaction strengths must be finite");
  }
  InteractionSpec s;
  s.a = a;
  s.b = b;
  s.symbol = omega;
  s.extrema = khat_extrema(omega, n_directions);
  s.classification = classify(a, b, s.extrema);
  s.kernel = multiplier_from_symbol(grid, omega);
  return s;
}

InteractionSpec contact_interaction(const BoxGrid& grid, double a) {
  InteractionSpec s;
  s.a = a;
  s.kernel.grid = grid;
  s.classification = classify(a, 0.0, {});
  return s;
}

InteractionSpec pair_interaction(const BoxGrid& grid, const PairPotential& w) {
  if (!w.has_fourier()) throw Error(ErrorCode::InvalidArgument, "pair potential needs ŵ");
  InteractionSpec s;
  s.a = 0.0;
  s.b = 1.0;
  s.pair_potential = true;
  s.kernel = multiplier_from_function(grid, w.eval_fourier);
  const auto [lo, hi] = std::minmax_element(s.kernel.values.begin(), s.kernel.values.end());
  s.extrema = {*lo, *hi};
  s.classification = *lo >= -1e-12 ? Classification::Stable : Classification::Unstable;
  return s;
}

InteractionSpec rebind(const InteractionSpec& spec, const BoxGrid& grid) {
  InteractionSpec s = spec;
  if (spec.pair_potential) {
    throw Error(ErrorCode::InvalidArgument, "pair interactions are rebuilt from the potential");
  }
  if (spec.symbol) {
    s.kernel = multiplier_from_symbol(grid, *spec.symbol);
  } else {
    s.kernel = MultiplierGrid{grid, {}};
  }
  return s;
}

void require_normalized(const Field& u, double tol) {
  const double m = mass(u);
  if (!(std::abs(m - 1.0) <= tol)) {
    throw Error(ErrorCode::NotNormalized, "field mass is " + std::to_string(m));
  }
}

GPProblem::GPProblem(const BoxGrid& grid, const TrapSpec& trap, const InteractionSpec& spec)
    : grid_(grid), spec_(spec) {
  if (!spec.kernel.values.empty()) require_same_grid(grid, spec.kernel.grid);
  const std::size_t n = grid.size();
  const int M = grid.points_per_axis();
  V_.resize(n);
  for (std::size_t i = 0; i < n; ++i) V_[i] = trap.V ? trap.V(grid.point(i)) : 0.0;
  if (trap.has_gauge()) {
    for (auto& a : A_) a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 a = trap.A(grid.point(i));
      A_[0][i] = a.x;
      A_[1][i] = a.y;
      A_[2][i] = a.z;
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  ksq_.resize(n);
  for (auto& k : kj_) k.resize(n);
  std::size_t idx = 0;
  for (int ix = 0; ix < M; ++ix)
    for (int iy = 0; iy < M; ++iy)
      for (int iz = 0; iz < M; ++iz, ++idx) {
        const double kx = grid.derivative_wavenumber(ix);
        const double ky = grid.derivative_wavenumber(iy);
        const double kz = grid.derivative_wavenumber(iz);
        ksq_[idx] = (kx * kx + ky * ky + kz * kz) * inv;
        kj_[0][idx] = kx * inv;
        kj_[1][idx] = ky * inv;
        kj_[2][idx] = kz * inv;
      }
}

Evaluation GPProblem::evaluate(const Field& u, bool with_gradient) const {
  require_same_grid(u.grid, grid_);
  const std::size_t n = grid_.size();
  const int M = grid_.points_per_axis();
  const double h3 = grid_.cell_volume();
  Evaluation ev;
  EnergyBreakdown& e = ev.energy;

  std::vector<cplx> spec(n), tmp(n);
  fft::forward(u.values, spec, M);

  // Kinetic part: h_kin u accumulates into hu.
  std::vector<cplx> hu(with_gradient ? n : 0);
  if (!has_gauge()) {
    std::vector<double> abs2(n);
    simd::abs2(spec, abs2);
    e.kinetic = h3 * simd::dot(ksq_, abs2);
    if (with_gradient) {
      simd::scale(ksq_, spec, tmp);
      fft::backward(tmp, hu, M);
    }
  } else {
    // w_j = (D_j + iA_j)u,  hu = -Σ_j (D_j + iA_j) w_j.
    std::vector<cplx> w(n), spectral(with_gradient ? n : 0, cplx(0.0));
    std::vector<cplx> pointwise(with_gradient ? n : 0, cplx(0.0));
    std::vector<cplx> wspec(with_gradient ? n : 0);
    double kin = 0.0;
    for (int j = 0; j < 3; ++j) {
      simd::scale_imag(kj_[j], spec, tmp);
      fft::backward(tmp, w, M);
      simd::scale_imag(A_[j], u.values, tmp);
      simd::axpby(1.0, w, 1.0, tmp, w);
      kin += simd::sum_abs2(w);
      if (with_gradient) {
        fft::forward(w, wspec, M);
        simd::scale_imag(kj_[j], wspec, wspec);
        simd::axpby(1.0, spectral, 1.0, wspec, spectral);
        simd::scale_imag(A_[j], w, tmp);
        simd::axpby(1.0, pointwise, 1.0, tmp, pointwise);
      }
    }
    e.kinetic = h3 * kin;
    if (with_gradient) {
      fft::backward(spectral, tmp, M);
      simd::axpby(-1.0, tmp, -1.0, pointwise, hu);
    }
  }

  std::vector<double> rho(n);
  simd::abs2(u.values, rho);
  e.potential = h3 * simd::dot(V_, rho);
  e.contact = 0.5 * spec_.a * h3 * simd::dot(rho, rho);

  std::vector<double> field(V_);  // V + aρ + bΦ
  if (spec_.a != 0.0) {
    for (std::size_t i = 0; i < n; ++i) field[i] += spec_.a * rho[i];
  }
  if (spec_.b != 0.0 && !spec_.kernel.values.empty()) {
    Convolution c = convolve_multiplier(RealField(grid_, rho), spec_.kernel);
    ev.conv_imag_residual = c.imag_residual;
    e.dipolar = 0.5 * spec_.b * h3 * simd::dot(c.field.values, rho);
    for (std::size_t i = 0; i < n; ++i) field[i] += spec_.b * c.field.values[i];
  }
  e.total = e.kinetic + e.potential + e.contact + e.dipolar;

  if (with_gradient) {
    ev.gradient = Field(grid_);
    simd::mul_add(hu, field, u.values, ev.gradient.values);
    ev.mu = mu_of(u, ev.gradient);
  }
  return ev;
}

double GPProblem::mu_of(const Field& u, const Field& gradient) const {
  const cplx z = simd::cdot(u.values, gradient.values) * grid_.cell_volume();
  if (std::abs(z.imag()) > 1e-10 * std::max(1.0, std::abs(z.real()))) {
    throw Error(ErrorCode::InternalConsistency,
                "chemical potential has imaginary part " + std::to_string(z.imag()));
  }
  return z.real();
}

EnergyBreakdown gp_energy(const Field& u, const TrapSpec& trap, const InteractionSpec& spec) {
  require_normalized(u);
  return GPProblem(u.grid, trap, spec).evaluate(u, false).energy;
}

Field gp_gradient(const Field& u, const TrapSpec& trap, const InteractionSpec& spec) {
  require_normalized(u);
  return GPProblem(u.grid, trap, spec).evaluate(u, true).gradient;
}

double chemical_potential(const Field& u, const TrapSpec& trap, const InteractionSpec& spec) {
  require_normalized(u);
  return GPProblem(u.grid, trap, spec).evaluate(u, true).mu;
}

double hartree_energy(const Field& u, const TrapSpec& trap, const PairPotential& w_N) {
  require_normalized(u);
  return GPProblem(u.grid, trap, pair_interaction(u.grid, w_N)).evaluate(u, false).energy.total;
}

double interaction_energy(const Field& u, const InteractionSpec& spec) {
  const BoxGrid& g = u.grid;
  const std::size_t n = g.size();
  std::vector<double> rho(n);
  simd::abs2(u.values, rho);
  double e = 0.5 * spec.a * g.cell_volume() * simd::dot(rho, rho);
  if (spec.b != 0.0 && !spec.kernel.values.empty()) {
    Convolution c = convolve_multiplier(RealField(g, rho), spec.kernel);
    e += 0.5 * spec.b * g.cell_volume() * simd::dot(c.field.values, rho);
  }
  return e;
}

double hartree_gp_gap(const Field& u, const PairPotential& w, HartreeScaling scaling,
                      const InteractionSpec& spec) {
  require_normalized(u);
  if (spec.pair_potential) throw Error(ErrorCode::InvalidArgument, "spec must be a GP spec");
  const InteractionSpec pair = pair_interaction(u.grid, scale_potential(w, scaling));
  // Both sides are lattice sums of the same |ρ̂|^2, so subtract multipliers first.
  InteractionSpec diff = pair;
  diff.a = -spec.a;
  diff.b = 1.0;
  const bool has_kernel = spec.b != 0.0 && !spec.kernel.values.empty();
  if (has_kernel) require_same_grid(spec.kernel.grid, u.grid);
  for (std::size_t i = 0; i < diff.kernel.values.size(); ++i) {
    diff.kernel.values[i] -= has_kernel ? spec.b * spec.kernel.values[i] : 0.0;
  }
  return std::abs(interaction_energy(u, diff));
}

double elgl_residual(const Field& u, const TrapSpec& trap, const InteractionSpec& spec) {
  if (trap.has_gauge()) {
    throw Error(ErrorCode::GaugeNotSupported, "Euler-Lagrange diagnostic needs A = 0");
  }
  require_normalized(u);
  const Evaluation ev = GPProblem(u.grid, trap, spec).evaluate(u, true);
  Field r(u.grid);
  simd::axpby(1.0, ev.gradient.values, -ev.mu, u.values, r.values);
  return std::sqrt(mass(r));
}

}  // namespace dipgp
