#include "dipgp/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "dipgp/error.hpp"
#include "dipgp/kernel.hpp"

namespace dipgp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesRadius = 1e-4;

// s - sin(s), accurate for small s.
double s_minus_sin(double s) {
  if (std::abs(s) > 0.5) return s - std::sin(s);
  const double s2 = s * s;
  double term = s * s2 / 6.0, sum = 0.0;
  for (int n = 1; n < 20; ++n) {
    sum += (n % 2 == 1) ? term : -term;
    term *= s2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double smeared_coulomb_radial(double r) {
  r = std::abs(r);
  if (r < kSeriesRadius) return 1.0 - r / 2.0 + r * r / 6.0 - r * r * r / 24.0;
  return -std::expm1(-r) / r;
}

double smeared_coulomb(Vec3 x) { return smeared_coulomb_radial(norm(x)); }

double w_dip(Vec3 x, double d, Vec3 n) {
  return 2.0 * smeared_coulomb(x) - smeared_coulomb(x + d * n) - smeared_coulomb(x - d * n);
}

double w_dip_hat(Vec3 k, double d, Vec3 n) {
  const double k2 = dot(k, k);
  if (k2 == 0.0) return 4.0 * kPi * d * d / 3.0;
  const double s = std::sin(0.5 * d * dot(k, n));
  return 16.0 * kPi * s * s / (k2 * (1.0 + k2));
}

double wtilde_dip(Vec3 k, double d) {
  const double q2 = k.x * k.x + k.y * k.y;
  const double p2 = q2 + k.z * k.z;
  if (p2 == 0.0) return 8.0 * kPi * d * d / 3.0;
  // p^2 - 4 sin^2(s)(d^-2 + q^2/4) with s = k3 d/2, rewritten without cancellation.
  const double s = 0.5 * k.z * d;
  const double c = std::cos(s);
  const double sms = s_minus_sin(s);
  const double numer = q2 * c * c + (4.0 / (d * d)) * sms * (s + std::sin(s));
  const double denom = p2 * (1.0 / (d * d) + 0.25 * q2);
  return 4.0 * kPi / (1.0 + p2) * numer / denom;
}

double stabilizer_psi(Vec3 x, double mu, double lambda) {
  const double r = norm(x);
  if (r < kSeriesRadius) {
    const double l2 = lambda * lambda;
    return mu * (0.5 * lambda - 3.0 * l2 * r / 8.0 + 7.0 * l2 * lambda * r * r / 48.0);
  }
  return mu * std::exp(-lambda * r) * std::expm1(0.5 * lambda * r) / r;
}

double stabilizer_psi_hat(Vec3 k, double mu, double lambda) {
  const double p2 = dot(k, k), l2 = lambda * lambda;
  return 0.75 * l2 * mu / ((p2 + 0.25 * l2) * (p2 + l2));
}

PairPotential make_w_dip(double d, Vec3 n) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "dipole strength d must be positive");
  if (std::abs(norm(n) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidAxis, "axis not unit");
  PairPotential w;
  w.eval_real = [d, n](const Vec3& x) { return w_dip(x, d, n); };
  w.eval_fourier = [d, n](const Vec3& k) { return w_dip_hat(k, d, n); };
  w.dipole_strength = d;
  w.dipolar_coefficient = d * d;
  w.axis = n;
  w.positive_type = true;
  w.description = "w_dip(d=" + std::to_string(d) + ")";
  return w;
}

PairPotential make_wtilde_dip(double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "dipole strength d must be positive");
  PairPotential w;
  w.eval_fourier = [d](const Vec3& k) { return wtilde_dip(k, d); };
  w.dipole_strength = d;
  w.dipolar_coefficient = -d * d;
  w.axis = kE3;
  w.positive_type = true;
  w.description = "wtilde_dip(d=" + std::to_string(d) + ")";
  return w;
}

PairPotential make_gaussian(double mass, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian width must be positive");
  const double norm3 = mass * std::pow(2.0 * kPi * sigma * sigma, -1.5);
  PairPotential w;
  w.eval_real = [norm3, sigma](const Vec3& x) {
    return norm3 * std::exp(-dot(x, x) / (2.0 * sigma * sigma));
  };
  w.eval_fourier = [mass, sigma](const Vec3& k) {
    return mass * std::exp(-0.5 * sigma * sigma * dot(k, k));
  };
  w.positive_type = mass >= 0.0;
  w.description = "gaussian(mass=" + std::to_string(mass) + ", sigma=" + std::to_string(sigma) + ")";
  return w;
}

PairPotential make_composite(double d, Vec3 n, double mass, double sigma) {
  PairPotential dip = make_w_dip(d, n);
  PairPotential g = make_gaussian(mass, sigma);
  PairPotential w;
  w.eval_real = [a = dip.eval_real, b = g.eval_real](const Vec3& x) { return a(x) + b(x); };
  w.eval_fourier = [a = dip.eval_fourier, b = g.eval_fourier](const Vec3& k) {
    return a(k) + b(k);
  };
  w.dipole_strength = d;
  w.dipolar_coefficient = d * d;
  w.axis = n;
  w.positive_type = mass >= 0.0;
  w.description = dip.description + " + " + g.description;
  return w;
}

PairPotential make_stabilizer(double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "stabilizer needs mu > 0 and lambda > 1");
  }
  PairPotential w;
  w.eval_real = [mu, lambda](const Vec3& x) { return stabilizer_psi(x, mu, lambda); };
  w.eval_fourier = [mu, lambda](const Vec3& k) {
    return 4.0 * kPi * stabilizer_psi_hat(k, mu, lambda);
  };
  w.positive_type = true;
  w.description = "stabilizer(mu=" + std::to_string(mu) + ", lambda=" + std::to_string(lambda) + ")";
  return w;
}

PairPotential zero_potential() {
  PairPotential w;
  w.eval_real = [](const Vec3&) { return 0.0; };
  w.eval_fourier = [](const Vec3&) { return 0.0; };
  w.positive_type = true;
  w.description = "zero";
  return w;
}

double beta_threshold(double s) { return 1.0 / 3.0 + s / (45.0 + 42.0 * s); }

PairPotential scale_potential(const PairPotential& w, HartreeScaling scaling) {
  if (scaling.N < 1 || !(scaling.beta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scaling needs N >= 1 and beta >= 0");
  }
  if (!w.has_fourier()) {
    throw Error(ErrorCode::InvalidArgument, "scaling needs a Fourier representation");
  }
  const double s = std::pow(static_cast<double>(scaling.N), scaling.beta);
  if (s == 1.0) return w;
  PairPotential out = w;
  out.eval_fourier = [f = w.eval_fourier, s](const Vec3& k) { return f(k / s); };
  if (w.has_real()) {
    out.eval_real = [f = w.eval_real, s](const Vec3& x) { return s * s * s * f(s * x); };
  }
  out.cutoff_R = w.cutoff_R / s;
  out.description = w.description + " scaled N=" + std::to_string(scaling.N) +
                    " beta=" + std::to_string(scaling.beta);
  return out;
}

double short_range_strength_b(const RealFn& w_hat, double b, Vec3 n) {
  const Vec3 dir = normalized(Vec3{1.0, 1.0, 1.0});
  const double khat = b == 0.0 ? 0.0 : khat_closed_dipolar(dir, n);
  constexpr int kLevels = 7;
  double table[kLevels][kLevels];
  std::vector<double> diag;
  for (int j = 0; j < kLevels; ++j) {
    const double p = 0.5 * std::ldexp(1.0, -j);
    table[j][0] = w_hat(p * dir) - b * khat;
    if (!std::isfinite(table[j][0])) {
      throw Error(ErrorCode::NoLimit, "non-finite transform near the origin");
    }
    // The difference is even in p, so extrapolate in p^2 (ratio 4 per level).
    double factor = 1.0;
    for (int m = 1; m <= j; ++m) {
      factor *= 4.0;
      table[j][m] = table[j][m - 1] + (table[j][m - 1] - table[j - 1][m - 1]) / (factor - 1.0);
    }
    diag.push_back(table[j][j]);
  }
  const double estimate = diag.back();
  const double first = std::abs(diag[1] - diag[0]);
  const double last = std::abs(diag[kLevels - 1] - diag[kLevels - 2]);
  if (!std::isfinite(estimate) || last > first ||
      last > 1e-6 * std::max(1.0, std::abs(estimate))) {
    throw Error(ErrorCode::NoLimit, "Richardson estimates do not settle");
  }
  return estimate;
}

double short_range_strength(const RealFn& w_hat, double d, Vec3 n) {
  return short_range_strength_b(w_hat, d * d, n);
}

StabilityProbeResult classical_stability_probe(const PairPotential& w, int N, long trials,
                                               double box, std::uint64_t seed) {
  if (!w.has_real()) throw Error(ErrorCode::NoRealSpaceForm, w.description);
  if (N < 2 || N > 64 || trials < 1 || trials > 100000 || !(box > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "probe needs 2 <= N <= 64, 1 <= trials <= 1e5");
  }
  static const char* kKinds[] = {"uniform", "coincident", "two-cluster",
                                 "lattice", "clustered",  "axis-chain"};
  StabilityProbeResult res;
  res.trials = trials;
  const double w0 = w.eval_real(Vec3{});
  res.bound_applies = w.positive_type;
  res.positive_type_bound = -N * w0 / 2.0;
  res.min_energy_per_particle = std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * std::max(1.0, std::abs(res.positive_type_bound));

  std::vector<Vec3> x(N);
  for (long t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uni(-0.5 * box, 0.5 * box);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_point = [&] { return Vec3{uni(rng), uni(rng), uni(rng)}; };
    auto log_uniform = [&](double lo, double hi) {
      return lo * std::pow(hi / lo, unit(rng));
    };
    const int kind = static_cast<int>(t % 6);
    switch (kind) {
      case 0:
        for (auto& p : x) p = random_point();
        break;
      case 1: {
        const Vec3 c = random_point();
        for (auto& p : x) p = c;
        break;
      }
      case 2: {
        const Vec3 c[2] = {random_point(), random_point()};
        const double sigma = log_uniform(1e-3, 0.1) * box;
        for (int i = 0; i < N; ++i) {
          x[i] = c[i % 2] + sigma * Vec3{gauss(rng), gauss(rng), gauss(rng)};
        }
        break;
      }
      case 3: {
        const int side = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(N))));
        const double a = log_uniform(1e-2, 1.0) * box / side;
        const Vec3 origin = random_point();
        for (int i = 0; i < N; ++i) {
          x[i] = origin + a * Vec3{static_cast<double>(i % side),
                                   static_cast<double>((i / side) % side),
                                   static_cast<double>(i / (side * side))};
        }
        break;
      }
      case 4: {
        const int clusters = 2 + static_cast<int>(unit(rng) * 3.0);
        std::vector<Vec3> centers(clusters);
        std::vector<double> widths(clusters);
        for (int c = 0; c < clusters; ++c) {
          centers[c] = random_point();
          widths[c] = log_uniform(1e-3, 0.3) * box;
        }
        for (int i = 0; i < N; ++i) {
          const int c = i % clusters;
          x[i] = centers[c] + widths[c] * Vec3{gauss(rng), gauss(rng), gauss(rng)};
        }
        break;
      }
      default: {
        const double spacing = log_uniform(1e-2, 1.0) * box / N;
        const Vec3 origin = random_point();
        for (int i = 0; i < N; ++i) x[i] = origin + (spacing * i) * w.axis;
        break;
      }
    }
    double e = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) e += w.eval_real(x[i] - x[j]);
    if (e / N < res.min_energy_per_particle) {
      res.min_energy_per_particle = e / N;
      res.worst_configuration = kKinds[kind];
    }
    if (res.bound_applies && e < res.positive_type_bound - tol) ++res.violations;
  }
  return res;
}

TrapSpec harmonic_trap(Vec3 omega2) {
  TrapSpec t;
  t.V = [omega2](const Vec3& x) {
    return omega2.x * x.x * x.x + omega2.y * x.y * x.y + omega2.z * x.z * x.z;
  };
  t.growth_exponent = 2.0;
  t.description = "harmonic";
  return t;
}

TrapSpec quartic_trap(double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "quartic coefficient must be > 0");
  TrapSpec t;
  t.V = [kappa](const Vec3& x) {
    const double r2 = dot(x, x);
    return kappa * r2 * r2;
  };
  t.growth_exponent = 4.0;
  t.description = "quartic";
  return t;
}

TrapSpec with_rotation(TrapSpec trap, double omega_rot) {
  if (omega_rot != 0.0) {
    trap.A = [omega_rot](const Vec3& x) { return Vec3{-0.5 * omega_rot * x.y, 0.5 * omega_rot * x.x, 0.0}; };
    trap.description += " + rotation";
  }
  return trap;
}

bool trap_growth_holds(const TrapSpec& trap, double C, const std::vector<Vec3>& points) {
  for (const Vec3& x : points) {
    const Vec3 a = trap.has_gauge() ? trap.A(x) : Vec3{};
    const double rhs = (dot(a, a) + std::pow(norm(x), trap.growth_exponent)) / C - C;
    if (trap.V(x) < rhs) return false;
  }
  return true;
}

}  // namespace dipgp
