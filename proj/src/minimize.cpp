#include "dipgp/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <numbers>
#include <random>

#include "dipgp/error.hpp"
#include "dipgp/simd.hpp"

namespace dipgp {
namespace {

constexpr int kMaxHalvings = 30;
constexpr double kBoundaryDensityLimit = 1e-12;

double residual_norm(const Field& u, const Evaluation& ev, Field& r) {
  r = Field(u.grid);
  simd::axpby(1.0, ev.gradient.values, -ev.mu, u.values, r.values);
  return std::sqrt(mass(r));
}

SolverRun run_flow(const GPProblem& problem, const Field& init, const SolverConfig& cfg,
                   const IterationObserver& observer) {
  if (!(cfg.energy_tol > 0.0) || !(cfg.residual_tol > 0.0) || !(cfg.step_init > 0.0) ||
      cfg.max_iters < 0) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances and step must be positive");
  }
  require_same_grid(init.grid, problem.grid());
  require_normalized(init);
  const double h3 = problem.grid().cell_volume();

  SolverRun run;
  Field u = normalize(init);
  Evaluation ev = problem.evaluate(u, true);
  if (!std::isfinite(ev.energy.total)) {
    throw Error(ErrorCode::NumericalBreakdown, "initial energy is not finite");
  }
  Field r;
  double res = residual_norm(u, ev, r);
  const double e0 = ev.energy.total;
  const double collapse_level = -1e3 * (std::abs(e0) + 1.0);
  auto record = [&](int iter, double step) {
    HistoryRow row{iter, ev.energy, step, res};
    run.history.push_back(row);
    if (observer) observer(row);
  };
  record(0, 0.0);

  double tau = cfg.step_init;
  Field trial(u.grid), r_new;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::optional<Evaluation> accepted;
    const double e_old = ev.energy.total;
    const double slack = 1e-12 * std::max(1.0, std::abs(e_old));
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      simd::axpby(1.0, u.values, -tau, r.values, trial.values);
      const double m = mass(trial);
      if (std::isfinite(m) && m > 0.0) {
        trial = normalize(trial);
        Evaluation t = problem.evaluate(trial, true);
        if (std::isfinite(t.energy.total) && t.energy.total <= e_old + slack) {
          accepted = std::move(t);
          break;
        }
      }
      tau *= 0.5;
    }
    if (!accepted) {
      run.final_state = u;
      throw Error(ErrorCode::NumericalBreakdown,
                  "no energy decrease after 30 step halvings at iteration " + std::to_string(it));
    }
    const double res_new = residual_norm(trial, *accepted, r_new);

    // Barzilai–Borwein: τ = <s,s>/Re<s,y> with s = Δu, y = Δr.
    double next = cfg.step_init;
    if (cfg.step_rule == StepRule::AdaptiveBB) {
      Field s(u.grid), y(u.grid);
      simd::axpby(1.0, trial.values, -1.0, u.values, s.values);
      simd::axpby(1.0, r_new.values, -1.0, r.values, y.values);
      const double ss = simd::sum_abs2(s.values) * h3;
      const double sy = simd::cdot(s.values, y.values).real() * h3;
      if (sy > 0.0 && std::isfinite(ss / sy)) next = std::clamp(ss / sy, 1e-10, 1e3);
    }

    const double used = tau;
    std::swap(u, trial);
    std::swap(r, r_new);
    ev = std::move(*accepted);
    res = res_new;
    run.iterations = it;
    record(it, used);
    tau = next;

    if (ev.energy.total < collapse_level) {
      run.verdict = Verdict::DivergedToCollapse;
      break;
    }
    const double rel = std::abs(e_old - ev.energy.total) / std::max(1.0, std::abs(ev.energy.total));
    if (rel < cfg.energy_tol && res < cfg.residual_tol) {
      run.verdict = Verdict::Converged;
      break;
    }
  }
  run.final_state = u;
  run.energy = ev.energy;
  run.mu = ev.mu;
  run.residual = res;
  const double edge = boundary_density(u);
  if (edge > kBoundaryDensityLimit) {
    run.warnings.push_back("boundary density " + std::to_string(edge) +
                           " exceeds 1e-12; the box may be too small");
  }
  return run;
}

Field sample_gaussian(const BoxGrid& grid, const Frame& frame, Vec3 widths, double cutoff) {
  Field f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 x = grid.point(i);
    const double a = dot(x, frame.u) / widths.x, b = dot(x, frame.v) / widths.y,
                 c = dot(x, frame.w) / widths.z;
    const double q = 0.5 * (a * a + b * b + c * c);
    f.values[i] = q > cutoff ? 0.0 : std::exp(-q);
  }
  return normalize(f);
}

// Weighted mean of a + bK̂ against |ρ̂|^2: 2·(interaction energy)/∫ρ^2.
double quadratic_form(const Field& f, const InteractionSpec& spec) {
  std::vector<double> rho(f.values.size());
  simd::abs2(f.values, rho);
  const double rho2 = f.grid.cell_volume() * simd::dot(rho, rho);
  return 2.0 * interaction_energy(f, spec) / rho2;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::MaxIters: return "MaxIters";
    case Verdict::DivergedToCollapse: return "DivergedToCollapse";
  }
  return "Unknown";
}

Field gaussian_init(const BoxGrid& grid, const TrapSpec& trap, std::uint64_t seed, double noise) {
  // Per axis, minimize 1/(2σ^2) + <V(x e_i) - V(0)> over σ for the density
  // e^{-x^2/σ^2}/(√π σ); the average uses the trapezoid rule in x/σ.
  const double v0 = trap.V ? trap.V(Vec3{}) : 0.0;
  auto axis_energy = [&](int axis, double sigma) {
    constexpr int kNodes = 401;
    constexpr double kSpan = 8.0;
    double acc = 0.0;
    for (int j = 0; j < kNodes; ++j) {
      const double t = -kSpan + 2.0 * kSpan * j / (kNodes - 1);
      Vec3 x{};
      (axis == 0 ? x.x : axis == 1 ? x.y : x.z) = sigma * t;
      const double v = trap.V ? trap.V(x) - v0 : 0.0;
      acc += v * std::exp(-t * t);
    }
    acc *= 2.0 * kSpan / (kNodes - 1) / std::sqrt(std::numbers::pi);
    return 0.5 / (sigma * sigma) + acc;
  };
  Vec3 widths;
  const double lo0 = std::log(grid.spacing()), hi0 = std::log(grid.side_length() / 8.0);
  for (int axis = 0; axis < 3; ++axis) {
    double lo = lo0, hi = std::max(hi0, lo0 + 1e-3);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < 100; ++k) {
      const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
      if (axis_energy(axis, std::exp(m1)) < axis_energy(axis, std::exp(m2))) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    (axis == 0 ? widths.x : axis == 1 ? widths.y : widths.z) = std::exp(0.5 * (lo + hi));
  }
  Field u = sample_gaussian(grid, Frame{kE1, kE2, kE3}, widths, kInfinity);
  if (noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> xi(0.0, 1.0);
    for (auto& v : u.values) v *= 1.0 + noise * xi(rng);
    u = normalize(u);
  }
  return u;
}

SolverRun ground_state(const Field& init, const TrapSpec& trap, const InteractionSpec& spec,
                       const SolverConfig& cfg, const IterationObserver& observer) {
  if (spec.classification == Classification::Unstable) {
    throw Error(ErrorCode::RefusedUnstable,
                "spec is Unstable; use instability_probe instead of the minimizer");
  }
  GPProblem problem(init.grid, trap, spec);
  SolverRun run = run_flow(problem, init, cfg, observer);
  if (spec.classification == Classification::Borderline) {
    run.borderline = true;
    run.warnings.push_back("Borderline spec: minimizing sequences may spread");
  }
  return run;
}

SolverRun hartree_ground_state(const Field& init, const TrapSpec& trap, const PairPotential& w,
                               HartreeScaling scaling, const SolverConfig& cfg,
                               const IterationObserver& observer) {
  const InteractionSpec spec = pair_interaction(init.grid, scale_potential(w, scaling));
  GPProblem problem(init.grid, trap, spec);
  SolverRun run = run_flow(problem, init, cfg, observer);
  if (spec.classification != Classification::Stable) {
    run.exploratory = true;
    run.warnings.push_back("scaled potential is not of positive type on the lattice; exploratory run");
  }
  return run;
}

ProbeResult instability_probe(const TrapSpec& trap, const InteractionSpec& spec,
                              const ProbeParams& params) {
  if (spec.classification != Classification::Unstable) {
    throw Error(ErrorCode::RefusedStable, "spec is " + std::string(to_string(spec.classification)) +
                                              "; probe requires Unstable");
  }
  if (spec.pair_potential) throw Error(ErrorCode::InvalidArgument, "probe needs a GP spec");
  const int M = params.M;
  const Frame frame = frame_around(spec.symbol ? spec.symbol->axis() : kE3);

  ProbeResult res;
  double worst = spec.a;
  if (spec.b > 0.0) worst = spec.a + spec.b * spec.extrema.inf;
  if (spec.b < 0.0) worst = spec.a + spec.b * spec.extrema.sup;
  res.depth = -worst;
  const double threshold = -0.25 * res.depth;  // -δ/2 with δ = depth/2

  // f_λ has widths (1/λ, 1/λ, λ^2) in the frame around the symbol axis.
  // Resolution: narrow width ≥ 2h and box half-width ≥ 6.5 long widths.
  constexpr double kTailWidths = 6.5, kPointsPerWidth = 2.0;
  const double max_aspect = M / (2.0 * kTailWidths * kPointsPerWidth);
  auto widths_for = [](double lam) { return Vec3{1.0 / lam, 1.0 / lam, lam * lam}; };
  constexpr double kCutoff = 18.0;  // truncate where f < e^{-18}

  struct Candidate {
    double lambda;
    BoxGrid grid;
    Field f;
    double form;
  };
  std::optional<Candidate> chosen;
  for (int j = 0; !chosen; ++j) {
    bool any = false;
    for (int sign : {1, -1}) {
      if (j == 0 && sign < 0) continue;
      const double lam = std::pow(2.0, sign * j / 3.0);
      const Vec3 w = widths_for(lam);
      const double wl = std::max(w.x, w.z), ws = std::min(w.x, w.z);
      if (wl / ws > max_aspect * (1.0 + 1e-12)) continue;
      any = true;
      const BoxGrid g(2.0 * kTailWidths * wl, M);
      Field f = sample_gaussian(g, frame, w, kCutoff);
      const double form = quadratic_form(f, rebind(spec, g));
      res.squeezes.emplace_back(lam, form);
      if (form <= threshold) {
        chosen = Candidate{lam, g, std::move(f), form};
        break;
      }
    }
    if (!any) break;
  }
  if (!chosen) {
    throw Error(ErrorCode::ResolutionExceeded,
                "no squeeze resolvable on M=" + std::to_string(M) +
                    " makes the interaction form negative enough");
  }
  res.lambda = chosen->lambda;
  const Vec3 w = widths_for(res.lambda);
  res.aspect = std::max(w.x, w.z) / std::min(w.x, w.z);
  res.form = chosen->form;

  // Dilation φ_ℓ = ℓ^{3/2} f(ℓx) scales kinetic by ℓ^2 and interaction by ℓ^3.
  // The local log-slope of -E is about 3 + 1/(ℓr - 1) with r = |interaction|/kinetic
  // at ℓ = 1, so doubling continues until the oldest fitted point has ℓr ≥ 8.
  double ratio;
  {
    const Evaluation ev = GPProblem(chosen->grid, trap, rebind(spec, chosen->grid))
                              .evaluate(chosen->f, false);
    ratio = std::abs(ev.energy.contact + ev.energy.dipolar) / ev.energy.kinetic;
  }
  const double L1 = chosen->grid.side_length();
  constexpr double kAsymptoticRatio = 8.0;

  for (int k = 0; k <= params.max_doublings; ++k) {
    const double ell = std::ldexp(1.0, k);
    Field phi;
    if (params.adaptive_grid) {
      phi = Field(BoxGrid(L1 / ell, M), chosen->f.values);
      phi = normalize(phi);
    } else {
      if (params.max_ell > 0 && ell > static_cast<double>(params.max_ell)) break;
      const BoxGrid g(params.L_box, M);
      const Vec3 scaled = (1.0 / ell) * w;
      const double wl = std::max(scaled.x, scaled.z), ws = std::min(scaled.x, scaled.z);
      if (ws < kPointsPerWidth * g.spacing() || kTailWidths * wl > 0.5 * g.side_length()) {
        long largest = 0;
        for (int j = 0; j < k; ++j) largest = 1L << j;
        throw Error(ErrorCode::ResolutionExceeded,
                    "phi_ell not resolvable at ell=" + std::to_string(static_cast<long>(ell)) +
                        "; largest valid ell = " + std::to_string(largest));
      }
      phi = sample_gaussian(g, frame, scaled, kCutoff);
    }
    const InteractionSpec local = rebind(spec, phi.grid);
    const Evaluation ev = GPProblem(phi.grid, trap, local).evaluate(phi, false);
    if (!std::isfinite(ev.energy.total)) {
      throw Error(ErrorCode::NumericalBreakdown, "non-finite probe energy");
    }
    res.steps.push_back({ell, phi.grid.side_length(), ev.energy});
    const std::size_t n = res.steps.size();
    if (params.adaptive_grid && n >= 3 && ev.energy.total < params.target_energy &&
        res.steps[n - 3].energy.total < 0.0 && res.steps[n - 3].ell * ratio >= kAsymptoticRatio) {
      break;
    }
  }

  if (res.steps.size() >= 3) {
    std::vector<double> x, y;
    for (std::size_t i = res.steps.size() - 3; i < res.steps.size(); ++i) {
      x.push_back(res.steps[i].ell);
      y.push_back(-res.steps[i].energy.total);
    }
    const bool negative = std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
    res.fitted_exponent = negative ? loglog_slope(x, y) : std::nan("");
  } else {
    res.fitted_exponent = std::nan("");
  }
  return res;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "slope fit needs matching samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StudyResult convergence_study(const Field& init, const TrapSpec& trap, const PairPotential& w,
                              double beta, const std::vector<long>& N_list,
                              const SolverConfig& cfg) {
  if (N_list.size() < 3) throw Error(ErrorCode::AtLeastThreePoints, "N_list needs >= 3 entries");
  if (!std::is_sorted(N_list.begin(), N_list.end()) ||
      std::adjacent_find(N_list.begin(), N_list.end()) != N_list.end() || N_list.front() < 1) {
    throw Error(ErrorCode::InvalidArgument, "N_list must be strictly ascending and positive");
  }
  if (!w.has_fourier()) throw Error(ErrorCode::InvalidArgument, "study needs ŵ");
  StudyResult out;
  out.b = w.dipolar_coefficient;
  out.a = short_range_strength_b(w.eval_fourier, out.b, w.axis);
  const InteractionSpec spec = out.b != 0.0
                                   ? make_interaction(init.grid, out.a, out.b, dipolar_symbol(w.axis))
                                   : contact_interaction(init.grid, out.a);
  out.gp_run = ground_state(init, trap, spec, cfg);
  out.e_gp = out.gp_run.energy.total;

  std::vector<double> ns, gaps, igaps;
  for (long N : N_list) {
    StudyRow row;
    row.N = N;
    try {
      const HartreeScaling scaling{beta, N};
      SolverRun run = hartree_ground_state(init, trap, w, scaling, cfg);
      row.e_hartree = run.energy.total;
      row.energy = run.energy;
      row.verdict = run.verdict;
      row.gap = row.e_hartree - out.e_gp;
      row.interaction_gap = hartree_gp_gap(out.gp_run.final_state, w, scaling, spec);
    } catch (const Error& e) {
      throw Error(e.code(), "N=" + std::to_string(N) + ": " + e.what());
    }
    ns.push_back(static_cast<double>(N));
    gaps.push_back(row.gap);
    igaps.push_back(row.interaction_gap);
    out.rows.push_back(row);
  }
  auto nonzero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double g) { return g != 0.0; });
  };
  out.fitted_rate = nonzero(gaps) ? loglog_slope(ns, gaps) : 0.0;
  out.fitted_interaction_rate = nonzero(igaps) ? loglog_slope(ns, igaps) : 0.0;
  return out;
}

}  // namespace dipgp
