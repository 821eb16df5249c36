// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion.
//   dipgp_acceptance                 run all
//   dipgp_acceptance --criterion 7   run one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dipgp/error.hpp"
#include "dipgp/minimize.hpp"

using namespace dipgp;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<Vec3> random_directions(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> out;
  while (static_cast<int>(out.size()) < n) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    if (norm(v) > 1e-3) out.push_back(normalized(v));
  }
  return out;
}

Field oscillator_state(const BoxGrid& g) {
  return normalize(sample(g, [](const Vec3& x) {
    return cplx(std::pow(kPi, -0.75) * std::exp(-0.5 * dot(x, x)));
  }));
}

Outcome kernel_closed_form() {
  const Stopwatch sw;
  const AngularSymbol om = dipolar_symbol(kE3);
  double worst = 0.0;
  for (const Vec3& k : random_directions(200, 2024)) {
    worst = std::max(worst, std::abs(khat_quadrature(om, k, 50) - khat_closed_dipolar(k, kE3)));
  }
  const double t = sw.seconds();
  return {worst <= 1e-6 && t < 30.0, fmt("max |quadrature - closed| = %.3e over 200 directions, %.2f s", worst, t)};
}

Outcome extrema() {
  const Extrema e = khat_extrema(dipolar_symbol(kE3), 2000);
  const double di = std::abs(e.inf + 4.0 * kPi / 3.0), ds = std::abs(e.sup - 8.0 * kPi / 3.0);
  return {di <= 1e-8 && ds <= 1e-8, fmt("inf = %.12f, sup = %.12f", e.inf, e.sup)};
}

Outcome truncated_bound() {
  const AngularSymbol om = dipolar_symbol(kE3);
  const std::vector<Vec3> dirs = {kE3, kE1, normalized(Vec3{1.0, 1.0, 1.0})};
  const double radii[2] = {0.01, 0.1};
  // C: smallest constant covering the 8 fit points (worst direction at each).
  double C = 0.0;
  for (double R0 : radii) {
    for (double p : {0.25, 0.5, 1.0, 2.0}) {
      for (const Vec3& n : dirs) C = std::max(C, std::abs(khat_truncated(om, p * n, 0.0, R0)) / (p * R0));
    }
  }
  // Residual: worst relative excess over C·|p|·R0 on a denser p set.
  double residual = 0.0;
  for (double R0 : radii) {
    for (int i = 0; i <= 14; ++i) {
      const double p = 0.25 * std::pow(8.0, i / 14.0);
      for (const Vec3& n : dirs) {
        const double v = std::abs(khat_truncated(om, p * n, 0.0, R0));
        residual = std::max(residual, v / (C * p * R0) - 1.0);
      }
    }
  }
  residual = std::max(residual, 0.0);
  return {C > 0.0 && std::isfinite(C) && residual <= 0.10,
          fmt("fitted C = %.4f, bound residual = %.2e", C, residual)};
}

Outcome oscillator() {
  const Stopwatch sw;
  const BoxGrid g(16.0, 64);
  const TrapSpec trap = harmonic_trap();
  // Perturbed start: the unperturbed Gaussian is already the exact ground state.
  const SolverRun run = ground_state(gaussian_init(g, trap, 1, 0.1), trap, contact_interaction(g, 0.0), {});
  const double t = sw.seconds();
  const bool ok = run.verdict == Verdict::Converged && std::abs(run.energy.total - 3.0) <= 5e-6 &&
                  std::abs(run.mu - 3.0) <= 5e-6 && t < 120.0;
  return {ok, fmt("E = %.10f, mu = %.10f, %d iterations, %.2f s", run.energy.total, run.mu, run.iterations, t)};
}

Outcome short_range() {
  bool ok = true;
  std::string detail;
  for (double d : {0.5, 1.0, 2.0}) {
    const double a = short_range_strength(make_w_dip(d).eval_fourier, d);
    const double err = std::abs(a - 4.0 * kPi / 3.0 * d * d);
    ok = ok && err <= 1e-4;
    detail += fmt("d=%.1f: %.10f (err %.1e)  ", d, a, err);
  }
  return {ok, detail};
}

Outcome positive_type() {
  const BoxGrid g(16.0, 64);
  double min_dip = kInfinity, min_tilde = kInfinity;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 k = g.wavevector(i);
    min_dip = std::min(min_dip, w_dip_hat(k, 1.0, kE3));
    min_tilde = std::min(min_tilde, wtilde_dip(k, 1.0));
  }
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 3.0);
  double worst = kInfinity;  // min of ψ̂ / lower bound
  for (auto [mu, lambda] : {std::pair{1.0, 1.5}, std::pair{0.3, 4.0}, std::pair{2.0, 10.0}}) {
    for (int i = 0; i < 2000; ++i) {
      const Vec3 p{n(rng), n(rng), n(rng)};
      const double p2 = dot(p, p);
      const double lower = 0.75 * lambda * lambda * mu / std::pow(p2 + lambda * lambda, 2);
      worst = std::min(worst, stabilizer_psi_hat(p, mu, lambda) / lower);
    }
  }
  const bool ok = min_dip >= -1e-12 && min_tilde >= -1e-12 && worst >= 1.0;
  return {ok, fmt("min w_dip^ = %.3e, min wtilde^ = %.3e on 64^3; min psi^/bound = %.4f", min_dip, min_tilde, worst)};
}

Outcome classical_stability() {
  const Stopwatch sw;
  const PairPotential w = make_w_dip(1.0);
  const double w0 = w.eval_real(Vec3{});
  const StabilityProbeResult r = classical_stability_probe(w, 16, 10000, 10.0, 1);
  const double t = sw.seconds();
  const bool ok = std::abs(w0 - 0.735759) <= 1e-6 && r.bound_applies && r.violations == 0 &&
                  r.trials == 10000 && t < 60.0;
  return {ok, fmt("w(0) = %.6f, min sum/N = %.4f vs bound/N = %.4f, violations = %ld, %.2f s", w0,
                  r.min_energy_per_particle, r.positive_type_bound / 16.0, r.violations, t)};
}

Outcome dichotomy() {
  const BoxGrid g(16.0, 64);
  const TrapSpec trap = harmonic_trap();
  const InteractionSpec stable = make_interaction(g, 4.0 * kPi / 3.0 * 1.05, 1.0, dipolar_symbol(kE3));
  const SolverRun run = ground_state(gaussian_init(g, trap), trap, stable, {});
  const bool stable_ok = stable.classification == Classification::Stable &&
                         run.verdict == Verdict::Converged && std::isfinite(run.energy.total) &&
                         run.energy.total > 0.0;

  const InteractionSpec unstable = make_interaction(g, 1.0, 1.0, dipolar_symbol(kE3));
  const ProbeResult probe = instability_probe(trap, unstable);
  // Decreasing from the peak of the sequence onward.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < probe.steps.size(); ++i) {
    if (probe.steps[i].energy.total > probe.steps[peak].energy.total) peak = i;
  }
  bool decreasing = true;
  for (std::size_t i = peak + 1; i < probe.steps.size(); ++i) {
    decreasing = decreasing && probe.steps[i].energy.total < probe.steps[i - 1].energy.total;
  }
  const double last = probe.steps.back().energy.total;
  const bool probe_ok = decreasing && last < -1e3 && probe.fitted_exponent >= 2.5 &&
                        probe.fitted_exponent <= 3.2;
  return {stable_ok && probe_ok,
          fmt("stable: %s, E = %.8f; probe: %zu steps, E(ell=%g) = %.4e, exponent = %.4f",
              std::string(to_string(run.verdict)).c_str(), run.energy.total, probe.steps.size(),
              probe.steps.back().ell, last, probe.fitted_exponent)};
}

Outcome gradient_check() {
  const BoxGrid g(16.0, 64);
  const TrapSpec trap = with_rotation(harmonic_trap(), 0.2);
  const InteractionSpec spec = make_interaction(g, 10.0, 1.0, dipolar_symbol(kE3));
  const GPProblem prob(g, trap, spec);
  const Field u = gaussian_init(g, trap, 3, 0.2);
  const Field grad = prob.evaluate(u, true).gradient;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  const double eps = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    // Random direction windowed to the condensate region.
    Field v(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 x = g.point(i);
      v.values[i] = cplx(n(rng), n(rng)) * std::exp(-0.25 * dot(x, x));
    }
    v = normalize(v);
    Field up = u, dn = u;
    for (std::size_t i = 0; i < g.size(); ++i) {
      up.values[i] += eps * v.values[i];
      dn.values[i] -= eps * v.values[i];
    }
    const double fd = (prob.evaluate(up, false).energy.total - prob.evaluate(dn, false).energy.total) / (2.0 * eps);
    cplx ip = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) ip += std::conj(grad.values[i]) * v.values[i];
    const double an = 2.0 * (ip * g.cell_volume()).real();
    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  return {worst <= 1e-6, fmt("max relative FD mismatch = %.3e over 10 directions (Omega_rot = 0.2)", worst)};
}

Outcome hartree_rate() {
  const Stopwatch sw;
  const BoxGrid g(16.0, 64);
  const TrapSpec trap = harmonic_trap();
  const PairPotential w = make_composite(1.0, kE3, 1.0, 1.0);
  const double a = short_range_strength_b(w.eval_fourier, w.dipolar_coefficient, w.axis);
  const InteractionSpec spec = make_interaction(g, a, w.dipolar_coefficient, dipolar_symbol(kE3));
  const Field u = oscillator_state(g);
  bool ok = true;
  std::string detail;
  for (double beta : {0.25, 0.5}) {
    std::vector<double> Ns, gaps;
    for (long N : {16L, 64L, 256L, 1024L}) {
      Ns.push_back(static_cast<double>(N));
      gaps.push_back(hartree_gp_gap(u, w, {beta, N}, spec));
    }
    const double slope = loglog_slope(Ns, gaps);
    ok = ok && std::abs(slope + beta) <= 0.15;
    detail += fmt("beta=%.2f slope %.4f; ", beta, slope);
  }
  const Field init = gaussian_init(g, trap);
  const SolverRun gp = ground_state(init, trap, spec, {});
  const SolverRun h = hartree_ground_state(init, trap, w, {1.0 / 3.0, 1024}, {});
  const double diff = std::abs(h.energy.total - gp.energy.total);
  const double t = sw.seconds();
  ok = ok && gp.verdict == Verdict::Converged && h.verdict == Verdict::Converged && diff <= 5e-2 && t < 900.0;
  detail += fmt("|e_H(1024) - e_GP| = %.3e at beta=1/3; %.1f s", diff, t);
  return {ok, detail};
}

// Relative L2 deviation of |u|^2 from its image under (x, y) -> (-y, x), and the
// largest spread of the density transform across lattice points with equal |k_perp|.
double axial_asymmetry(const Field& u) {
  const BoxGrid& g = u.grid;
  const int M = g.points_per_axis();
  Field rho(g);
  for (std::size_t i = 0; i < g.size(); ++i) rho.values[i] = std::norm(u.values[i]);
  double diff = 0.0, ref = 0.0;
  for (int ix = 0; ix < M; ++ix) {
    for (int iy = 0; iy < M; ++iy) {
      for (int iz = 0; iz < M; ++iz) {
        const double a = rho.values[g.index(ix, iy, iz)].real();
        const double b = rho.values[g.index((M - iy) % M, ix, iz)].real();
        diff += (a - b) * (a - b);
        ref += a * a;
      }
    }
  }
  const double lattice = std::sqrt(diff / ref);

  const Field F = dft(rho);
  const double top = std::abs(F.values[0]);
  auto at = [&](int qx, int qy, int qz) { return F.values[g.index((qx + M) % M, (qy + M) % M, (qz + M) % M)]; };
  // Integer pairs with equal radius that no lattice symmetry maps onto each other.
  const int pairs[][4] = {{5, 0, 3, 4}, {10, 0, 6, 8}, {13, 0, 5, 12}, {15, 0, 9, 12}, {25, 0, 7, 24}};
  double spectral = 0.0;
  for (const auto& p : pairs) {
    if (std::max({p[0], p[1], p[2], p[3]}) >= M / 2) continue;
    for (int qz = -M / 2 + 1; qz < M / 2; ++qz) {
      spectral = std::max(spectral, std::abs(at(p[0], p[1], qz) - at(p[2], p[3], qz)) / top);
    }
  }
  return std::max(lattice, spectral);
}

Outcome uniqueness_symmetry() {
  const BoxGrid g(16.0, 64);
  const TrapSpec trap = harmonic_trap();
  const InteractionSpec spec = make_interaction(g, 10.0, 1.0, dipolar_symbol(kE3));
  SolverConfig cfg;
  cfg.residual_tol = 1e-9;
  const SolverRun a = ground_state(gaussian_init(g, trap, 1, 0.1), trap, spec, cfg);
  const SolverRun b = ground_state(gaussian_init(g, trap, 2, 0.1), trap, spec, cfg);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ra = std::norm(a.final_state.values[i]), rb = std::norm(b.final_state.values[i]);
    diff += (ra - rb) * (ra - rb);
    ref += ra * ra;
  }
  const double l2 = std::sqrt(diff / ref);
  const double asym = std::max(axial_asymmetry(a.final_state), axial_asymmetry(b.final_state));
  const bool ok = a.verdict == Verdict::Converged && b.verdict == Verdict::Converged && l2 <= 1e-4 &&
                  asym <= 1e-6;
  return {ok, fmt("density L2 difference = %.3e, axial asymmetry = %.3e, E = %.12f / %.12f", l2, asym,
                  a.energy.total, b.energy.total)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"kernel closed-form agreement", kernel_closed_form},
      {"multiplier extrema", extrema},
      {"truncated-kernel small-p bound", truncated_bound},
      {"oscillator benchmark", oscillator},
      {"short-range strength", short_range},
      {"positive-type certificates", positive_type},
      {"classical-stability probe", classical_stability},
      {"stability dichotomy", dichotomy},
      {"gradient correctness", gradient_check},
      {"Hartree to GP rate", hartree_rate},
      {"uniqueness and axial symmetry", uniqueness_symmetry},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && id != only) continue;
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %2d: %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
