#include "dipgp/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "dipgp/config.hpp"
#include "dipgp/error.hpp"
#include "dipgp/io.hpp"
#include "dipgp/simd.hpp"

namespace dipgp {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  RunConfig cfg;
  fs::path dir;
  json results = json::object();
  json checks = json::array();
  json warnings = json::array();

  void check(const std::string& name, bool pass, const json& detail = nullptr) {
    json c{{"name", name}, {"pass", pass}};
    if (!detail.is_null()) c["detail"] = detail;
    checks.push_back(c);
  }
  void warn(const std::string& w) { warnings.push_back(w); }
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NumericalBreakdown:
    case ErrorCode::ResolutionExceeded:
    case ErrorCode::NoLimit:
    case ErrorCode::InternalConsistency:
      return kExitNumerical;
    default:
      return kExitValidation;
  }
}

json extrema_json(const Extrema& e) { return {{"inf", e.inf}, {"sup", e.sup}}; }

bool monotone(const std::vector<HistoryRow>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    const double prev = h[i - 1].energy.total;
    if (h[i].energy.total > prev + 1e-12 * std::max(1.0, std::abs(prev))) return false;
  }
  return true;
}

json moments(const Field& u) {
  double m[3] = {0, 0, 0};
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const Vec3 x = u.grid.point(i);
    const double r = std::norm(u.values[i]);
    m[0] += x.x * x.x * r;
    m[1] += x.y * x.y * r;
    m[2] += x.z * x.z * r;
  }
  const double h3 = u.grid.cell_volume();
  return {{"x2", m[0] * h3}, {"y2", m[1] * h3}, {"z2", m[2] * h3}};
}

void warn_rotation(Context& ctx, const TrapSpec& trap, const BoxGrid& grid) {
  if (!trap.has_gauge()) return;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 x = grid.point(i);
    worst = std::max(worst, norm(x) * norm(trap.A(x)));
  }
  ctx.results["max_r_abs_A"] = worst;
  if (worst >= 0.5) {
    ctx.warn("max |x||A(x)| on the grid is " + io::format_double(worst) +
             " (>= 1/2): the small-rotation uniqueness regime does not cover this run");
  }
}

void report_run(Context& ctx, const SolverRun& run, json& into) {
  into["energy"] = io::to_json(run.energy, run.mu, run.residual);
  into["verdict"] = std::string(to_string(run.verdict));
  into["iterations"] = run.iterations;
  into["borderline"] = run.borderline;
  into["exploratory"] = run.exploratory;
  for (const auto& w : run.warnings) ctx.warn(w);
}

void ground_state_mode(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const BoxGrid grid(cfg.L_box, cfg.M);
  const TrapSpec trap = build_trap(cfg);
  const AngularSymbol symbol = build_symbol(cfg);
  const InteractionSpec spec = make_interaction(grid, cfg.interaction.a, cfg.interaction.b, symbol,
                                                cfg.kernel_table.extrema_directions);
  ctx.results["classification"] = std::string(to_string(spec.classification));
  ctx.results["extrema"] = extrema_json(spec.extrema);
  warn_rotation(ctx, trap, grid);

  const Field init = gaussian_init(grid, trap, cfg.solver.seed, cfg.solver.init_noise);
  io::HistoryWriter history(ctx.dir / "history.csv");
  const SolverRun run = ground_state(init, trap, spec, cfg.solver,
                                     [&](const HistoryRow& row) { history.write(row); });
  io::write_field(ctx.dir, run.final_state);
  io::write_density_slices(ctx.dir, run.final_state);
  report_run(ctx, run, ctx.results);
  ctx.results["moments"] = moments(run.final_state);
  ctx.results["boundary_density"] = boundary_density(run.final_state);
  ctx.check("energy_monotone", monotone(run.history));
  ctx.check("converged", run.verdict == Verdict::Converged);
  ctx.check("residual_below_tol", run.residual <= cfg.solver.residual_tol, run.residual);
}

void hartree_study_mode(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const BoxGrid grid(cfg.L_box, cfg.M);
  const TrapSpec trap = build_trap(cfg);
  const PairPotential w = build_potential(cfg);
  warn_rotation(ctx, trap, grid);
  const double beta = cfg.interaction.beta;
  const double threshold = beta_threshold(trap.growth_exponent);
  ctx.results["beta"] = beta;
  ctx.results["beta_threshold"] = threshold;
  if (beta >= threshold) {
    ctx.warn("beta is not below 1/3 + s/(45+42s); the mean-field limit is not covered");
  }

  const Field init = gaussian_init(grid, trap, cfg.solver.seed, cfg.solver.init_noise);
  const StudyResult study =
      convergence_study(init, trap, w, beta, cfg.interaction.N_list, cfg.solver);
  {
    io::HistoryWriter history(ctx.dir / "history.csv");
    for (const auto& row : study.gp_run.history) history.write(row);
  }
  io::write_field(ctx.dir, study.gp_run.final_state);
  io::write_density_slices(ctx.dir, study.gp_run.final_state);

  std::ofstream table(ctx.dir / "study.csv");
  table << "N,e_hartree,gap,interaction_gap,verdict\n";
  json rows = json::array();
  for (const auto& r : study.rows) {
    table << r.N << ',' << io::format_double(r.e_hartree) << ',' << io::format_double(r.gap) << ','
          << io::format_double(r.interaction_gap) << ',' << to_string(r.verdict) << '\n';
    rows.push_back({{"N", r.N},
                    {"e_hartree", r.e_hartree},
                    {"gap", r.gap},
                    {"interaction_gap", r.interaction_gap},
                    {"verdict", std::string(to_string(r.verdict))},
                    {"energy", io::to_json(r.energy)}});
  }
  ctx.results["a"] = study.a;
  ctx.results["b"] = study.b;
  ctx.results["e_gp"] = study.e_gp;
  json gp;
  report_run(ctx, study.gp_run, gp);
  ctx.results["gp_run"] = gp;
  ctx.results["rows"] = rows;
  ctx.results["fitted_rate"] = study.fitted_rate;
  ctx.results["fitted_interaction_rate"] = study.fitted_interaction_rate;
  ctx.check("gp_converged", study.gp_run.verdict == Verdict::Converged);
  bool all_converged = true;
  for (const auto& r : study.rows) all_converged = all_converged && r.verdict == Verdict::Converged;
  ctx.check("hartree_converged", all_converged);
  ctx.check("interaction_rate_within_0.15_of_minus_beta",
            std::abs(study.fitted_interaction_rate + beta) <= 0.15, study.fitted_interaction_rate);
}

void probe_mode(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const BoxGrid grid(cfg.L_box, cfg.M);
  const TrapSpec trap = build_trap(cfg);
  const AngularSymbol symbol = build_symbol(cfg);
  const InteractionSpec spec = make_interaction(grid, cfg.interaction.a, cfg.interaction.b, symbol,
                                                cfg.kernel_table.extrema_directions);
  ctx.results["classification"] = std::string(to_string(spec.classification));
  ctx.results["extrema"] = extrema_json(spec.extrema);
  const ProbeResult probe = instability_probe(trap, spec, cfg.probe);

  std::ofstream csv(ctx.dir / "probe.csv");
  csv << "ell,L_box,total,kinetic,potential,contact,dipolar\n";
  json steps = json::array();
  for (const auto& s : probe.steps) {
    csv << io::format_double(s.ell) << ',' << io::format_double(s.L_box) << ','
        << io::format_double(s.energy.total) << ',' << io::format_double(s.energy.kinetic) << ','
        << io::format_double(s.energy.potential) << ',' << io::format_double(s.energy.contact)
        << ',' << io::format_double(s.energy.dipolar) << '\n';
    steps.push_back({{"ell", s.ell}, {"L_box", s.L_box}, {"energy", io::to_json(s.energy)}});
  }
  json squeezes = json::array();
  for (const auto& [lam, form] : probe.squeezes) squeezes.push_back({{"lambda", lam}, {"form", form}});
  ctx.results["lambda"] = probe.lambda;
  ctx.results["aspect"] = probe.aspect;
  ctx.results["depth"] = probe.depth;
  ctx.results["form"] = probe.form;
  ctx.results["squeezes"] = squeezes;
  ctx.results["steps"] = steps;
  ctx.results["fitted_exponent"] = probe.fitted_exponent;
  const double last = probe.steps.empty() ? 0.0 : probe.steps.back().energy.total;
  ctx.check("reaches_target_energy", last < cfg.probe.target_energy, last);
  ctx.check("exponent_in_2.5_3.2",
            probe.fitted_exponent >= 2.5 && probe.fitted_exponent <= 3.2, probe.fitted_exponent);
}

void kernel_table_mode(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AngularSymbol symbol = build_symbol(cfg);
  const bool dipolar = symbol.kind() == AngularSymbol::Kind::Dipolar;
  std::ofstream csv(ctx.dir / "kernel_table.csv");
  csv << "kx,ky,kz,cos_theta,quadrature,closed_form,abs_diff\n";
  double worst = 0.0;
  for (const Vec3& k : fibonacci_sphere(cfg.kernel_table.directions)) {
    const double q = khat_quadrature(symbol, k, cfg.kernel_table.quad_order);
    const double c = dot(k, symbol.axis());
    csv << io::format_double(k.x) << ',' << io::format_double(k.y) << ',' << io::format_double(k.z)
        << ',' << io::format_double(c) << ',' << io::format_double(q);
    if (dipolar) {
      const double exact = khat_closed_dipolar(k, symbol.axis());
      worst = std::max(worst, std::abs(q - exact));
      csv << ',' << io::format_double(exact) << ',' << io::format_double(std::abs(q - exact));
    } else {
      csv << ",,";
    }
    csv << '\n';
  }
  ctx.results["cancellation_residual"] = check_cancellation(symbol, kCancellationOrder);
  ctx.results["extrema"] = extrema_json(khat_extrema(symbol, cfg.kernel_table.extrema_directions));
  if (dipolar) {
    ctx.results["max_abs_diff"] = worst;
    ctx.check("closed_form_agreement_1e-6", worst <= 1e-6, worst);
  }
}

void audit_mode(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const BoxGrid grid(cfg.L_box, cfg.M);
  const PairPotential w = build_potential(cfg);
  ctx.results["description"] = w.description;
  ctx.results["positive_type"] = w.positive_type;
  if (w.has_fourier()) {
    const MultiplierGrid m = multiplier_from_function(grid, w.eval_fourier);
    double lo = m.values[0], hi = std::abs(m.values[0]);
    for (double v : m.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, std::abs(v));
    }
    ctx.results["lattice_min_fourier"] = lo;
    if (w.positive_type) ctx.check("fourier_nonnegative_on_lattice", lo >= -1e-12, lo);
    try {
      ctx.results["short_range_strength"] =
          short_range_strength_b(w.eval_fourier, w.dipolar_coefficient, w.axis);
    } catch (const Error& e) {
      ctx.warn(std::string("short-range strength: ") + e.what());
    }
    if (w.has_real()) {
      const Field samples = sample(grid, [&](const Vec3& x) { return cplx(w.eval_real(x)); });
      const Field transform = dft(samples);
      double diff = 0.0;
      for (std::size_t i = 1; i < grid.size(); ++i) {
        diff = std::max(diff, std::abs(transform.values[i] - m.values[i]));
      }
      ctx.results["representation_mismatch"] = diff / hi;
      ctx.check("representation_consistency_1e-3", diff <= 1e-3 * hi, diff / hi);
    }
  }
  if (w.has_real()) {
    ctx.results["w0"] = w.eval_real(Vec3{});
    const StabilityProbeResult p =
        classical_stability_probe(w, cfg.audit.N, cfg.audit.trials, cfg.audit.box, cfg.audit.seed);
    ctx.results["stability_probe"] = {{"N", cfg.audit.N},
                                      {"trials", p.trials},
                                      {"min_energy_per_particle", p.min_energy_per_particle},
                                      {"positive_type_bound", p.positive_type_bound},
                                      {"bound_applies", p.bound_applies},
                                      {"violations", p.violations},
                                      {"worst_configuration", p.worst_configuration}};
    if (p.bound_applies) ctx.check("positive_type_bound_holds", p.violations == 0, p.violations);
  }
}

}  // namespace

int validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    out << config_path << ": ok (mode " << to_string(cfg.mode) << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }
}

int run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx;
  try {
    ctx.cfg = load_config(config_path);
    ctx.dir = prepare_output_dir(ctx.cfg);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }

  json report;
  report["version"] = std::string(kVersion);
  report["mode"] = std::string(to_string(ctx.cfg.mode));
  report["config"] = ctx.cfg.echo;
  report["config_text"] = ctx.cfg.source_text;
  report["threads"] = 1;
  report["simd_backend"] = std::string(simd::backend_name(simd::active_backend()));

  int code = kExitOk;
  try {
    switch (ctx.cfg.mode) {
      case Mode::GroundState: ground_state_mode(ctx); break;
      case Mode::HartreeStudy: hartree_study_mode(ctx); break;
      case Mode::InstabilityProbe: probe_mode(ctx); break;
      case Mode::KernelTable: kernel_table_mode(ctx); break;
      case Mode::PotentialAudit: audit_mode(ctx); break;
    }
    report["status"] = "ok";
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    report["status"] = "error";
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    err << e.what() << '\n';
  }
  report["results"] = ctx.results;
  report["checks"] = ctx.checks;
  report["warnings"] = ctx.warnings;
  report["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& w : ctx.warnings) err << "warning: " << w.get<std::string>() << '\n';
  try {
    io::write_json(ctx.dir / "report.json", report);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }
  if (code == kExitOk) out << "wrote " << (ctx.dir / "report.json").string() << '\n';
  return code;
}

}  // namespace dipgp
