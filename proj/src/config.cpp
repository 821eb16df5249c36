#include "dipgp/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dipgp/error.hpp"

namespace dipgp {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"run", {"mode", "output_dir"}},
      {"grid", {"M", "L_box"}},
      {"trap", {"type", "omega2", "omega2_x", "omega2_y", "omega2_z", "kappa", "A", "omega_rot"}},
      {"interaction",
       {"a", "b", "symbol", "axis", "coefficients", "potential", "d", "beta", "N_list",
        "gaussian_mass", "gaussian_sigma", "stabilizer_mu", "stabilizer_lambda"}},
      {"solver",
       {"max_iters", "step_init", "energy_tol", "residual_tol", "step_rule", "seed", "init_noise"}},
      {"kernel_table", {"directions", "quad_order", "extrema_directions"}},
      {"probe", {"adaptive_grid", "target_energy", "max_ell", "max_doublings"}},
      {"audit", {"N", "trials", "box", "seed"}},
  };
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Line numbers of "section.key" entries, for error anchoring.
std::map<std::string, int> index_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string line, section;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      lines.emplace(section, n);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) lines.emplace(section + "." + trim(t.substr(0, eq)), n);
  }
  return lines;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const std::string& name, std::map<std::string, int> lines)
      : tree_(tree), name_(name), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    auto it = lines_.find(path);
    if (it == lines_.end()) {
      const auto dot = path.find('.');
      it = lines_.find(path.substr(0, dot));
    }
    const std::string where = it == lines_.end() ? name_ : name_ + ":" + std::to_string(it->second);
    throw Error(ErrorCode::ConfigError, where + ": " + path + ": " + msg);
  }

  bool has(const std::string& path) const { return tree_.get_optional<std::string>(path).has_value(); }

  std::string str(const std::string& path, const std::string& fallback) const {
    return trim(tree_.get<std::string>(path, fallback));
  }

  double num(const std::string& path, double fallback) const {
    if (!has(path)) return fallback;
    const std::string s = str(path, "");
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(path, "expected a number, got '" + s + "'");
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
  }

  long integer(const std::string& path, long fallback) const {
    if (!has(path)) return fallback;
    const std::string s = str(path, "");
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(path, "expected an integer, got '" + s + "'");
    return v;
  }

  bool boolean(const std::string& path, bool fallback) const {
    if (!has(path)) return fallback;
    const std::string s = str(path, "");
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(path, "expected true or false");
  }

  std::vector<double> numbers(const std::string& path) const {
    std::vector<double> out;
    std::string s = str(path, "");
    for (char& c : s) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
        fail(path, "bad list entry '" + tok + "'");
      }
      out.push_back(v);
    }
    return out;
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
  std::map<std::string, int> lines_;
};

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::GroundState: return "ground_state";
    case Mode::HartreeStudy: return "hartree_study";
    case Mode::InstabilityProbe: return "instability_probe";
    case Mode::KernelTable: return "kernel_table";
    case Mode::PotentialAudit: return "potential_audit";
  }
  return "unknown";
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError,
                name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const auto lines = index_lines(text);
  Reader r(tree, name, lines);

  RunConfig cfg;
  cfg.source_text = text;
  cfg.source_name = name;
  for (const auto& [section, body] : tree) {
    auto sit = schema().find(section);
    if (body.empty() && !body.data().empty()) r.fail(section, "keys must live inside a [section]");
    if (sit == schema().end()) r.fail(section, "unknown section");
    for (const auto& [key, value] : body) {
      if (!sit->second.count(key)) r.fail(section + "." + key, "unknown key");
      cfg.echo[section][key] = value.data();
    }
  }
  // The INI reader drops empty sections; check their headers from the text.
  for (const auto& [path, line] : lines) {
    if (path.find('.') == std::string::npos && !schema().count(path)) r.fail(path, "unknown section");
  }

  const std::string mode = r.str("run.mode", "");
  if (mode == "ground_state") cfg.mode = Mode::GroundState;
  else if (mode == "hartree_study") cfg.mode = Mode::HartreeStudy;
  else if (mode == "instability_probe") cfg.mode = Mode::InstabilityProbe;
  else if (mode == "kernel_table") cfg.mode = Mode::KernelTable;
  else if (mode == "potential_audit") cfg.mode = Mode::PotentialAudit;
  else r.fail("run.mode", "expected ground_state, hartree_study, instability_probe, kernel_table or potential_audit");
  cfg.output_dir = r.str("run.output_dir", cfg.output_dir);

  cfg.M = static_cast<int>(r.integer("grid.M", cfg.M));
  if (cfg.M < 8 || (cfg.M & (cfg.M - 1)) != 0 || cfg.M > 1024) {
    r.fail("grid.M", "must be a power of two between 8 and 1024");
  }
  cfg.L_box = r.num("grid.L_box", cfg.L_box);
  if (!(cfg.L_box > 0.0)) r.fail("grid.L_box", "must be positive");

  TrapConfig& t = cfg.trap;
  t.type = r.str("trap.type", t.type);
  if (t.type != "harmonic" && t.type != "anisotropic-harmonic" && t.type != "quartic") {
    r.fail("trap.type", "expected harmonic, anisotropic-harmonic or quartic");
  }
  t.omega2 = r.num("trap.omega2", t.omega2);
  t.omega2_axes = {r.num("trap.omega2_x", 1.0), r.num("trap.omega2_y", 1.0),
                   r.num("trap.omega2_z", 1.0)};
  t.kappa = r.num("trap.kappa", t.kappa);
  if (!(t.omega2 > 0.0)) r.fail("trap.omega2", "must be positive");
  if (!(t.omega2_axes.x > 0.0 && t.omega2_axes.y > 0.0 && t.omega2_axes.z > 0.0)) {
    r.fail("trap.omega2_x", "axis frequencies must be positive");
  }
  if (!(t.kappa > 0.0)) r.fail("trap.kappa", "must be positive");
  t.gauge = r.str("trap.A", t.gauge);
  if (t.gauge != "none" && t.gauge != "uniform-rotation") {
    r.fail("trap.A", "expected none or uniform-rotation");
  }
  t.omega_rot = r.num("trap.omega_rot", t.omega_rot);

  InteractionConfig& in = cfg.interaction;
  in.a = r.num("interaction.a", in.a);
  in.b = r.num("interaction.b", in.b);
  in.symbol = r.str("interaction.symbol", in.symbol);
  if (in.symbol != "dipolar" && in.symbol != "custom") {
    r.fail("interaction.symbol", "expected dipolar or custom");
  }
  if (r.has("interaction.axis")) {
    const auto v = r.numbers("interaction.axis");
    if (v.size() != 3) r.fail("interaction.axis", "expected three components");
    in.axis = {v[0], v[1], v[2]};
    if (std::abs(norm(in.axis) - 1.0) > 1e-12) r.fail("interaction.axis", "must be a unit vector");
  }
  in.coefficients = r.numbers("interaction.coefficients");
  if (in.symbol == "custom" && in.coefficients.empty()) {
    r.fail("interaction.coefficients", "custom symbol needs coefficients");
  }
  in.potential = r.str("interaction.potential", in.potential);
  static const std::set<std::string> potentials{"w_dip", "wtilde_dip", "gaussian",
                                                "composite", "stabilizer", "zero"};
  if (!potentials.count(in.potential)) r.fail("interaction.potential", "unknown potential");
  in.d = r.num("interaction.d", in.d);
  in.beta = r.num("interaction.beta", in.beta);
  if (!(in.beta >= 0.0 && in.beta < 1.0)) r.fail("interaction.beta", "must lie in [0, 1)");
  if (r.has("interaction.N_list")) {
    in.N_list.clear();
    for (double v : r.numbers("interaction.N_list")) {
      if (v < 1 || v != std::floor(v)) r.fail("interaction.N_list", "entries must be positive integers");
      in.N_list.push_back(static_cast<long>(v));
    }
  }
  in.gaussian_mass = r.num("interaction.gaussian_mass", in.gaussian_mass);
  in.gaussian_sigma = r.num("interaction.gaussian_sigma", in.gaussian_sigma);
  in.stabilizer_mu = r.num("interaction.stabilizer_mu", in.stabilizer_mu);
  in.stabilizer_lambda = r.num("interaction.stabilizer_lambda", in.stabilizer_lambda);

  SolverConfig& s = cfg.solver;
  s.max_iters = static_cast<int>(r.integer("solver.max_iters", s.max_iters));
  s.step_init = r.num("solver.step_init", s.step_init);
  s.energy_tol = r.num("solver.energy_tol", s.energy_tol);
  s.residual_tol = r.num("solver.residual_tol", s.residual_tol);
  const std::string rule = r.str("solver.step_rule", "adaptive-bb");
  if (rule == "adaptive-bb") s.step_rule = StepRule::AdaptiveBB;
  else if (rule == "fixed") s.step_rule = StepRule::Fixed;
  else r.fail("solver.step_rule", "expected adaptive-bb or fixed");
  s.seed = static_cast<std::uint64_t>(r.integer("solver.seed", 0));
  s.init_noise = r.num("solver.init_noise", s.init_noise);
  if (s.max_iters < 0) r.fail("solver.max_iters", "must be >= 0");
  if (!(s.step_init > 0.0)) r.fail("solver.step_init", "must be positive");
  if (!(s.energy_tol > 0.0)) r.fail("solver.energy_tol", "must be positive");
  if (!(s.residual_tol > 0.0)) r.fail("solver.residual_tol", "must be positive");
  if (!(s.init_noise >= 0.0)) r.fail("solver.init_noise", "must be >= 0");

  KernelTableConfig& k = cfg.kernel_table;
  k.directions = static_cast<int>(r.integer("kernel_table.directions", k.directions));
  k.quad_order = static_cast<int>(r.integer("kernel_table.quad_order", k.quad_order));
  k.extrema_directions =
      static_cast<int>(r.integer("kernel_table.extrema_directions", k.extrema_directions));
  if (k.directions < 1) r.fail("kernel_table.directions", "must be >= 1");
  if (k.quad_order < 6) r.fail("kernel_table.quad_order", "must be >= 6");
  if (k.extrema_directions < 100) r.fail("kernel_table.extrema_directions", "must be >= 100");

  ProbeParams& p = cfg.probe;
  p.M = cfg.M;
  p.L_box = cfg.L_box;
  p.adaptive_grid = r.boolean("probe.adaptive_grid", p.adaptive_grid);
  p.target_energy = r.num("probe.target_energy", p.target_energy);
  p.max_ell = r.integer("probe.max_ell", p.max_ell);
  p.max_doublings = static_cast<int>(r.integer("probe.max_doublings", p.max_doublings));
  if (p.max_doublings < 2 || p.max_doublings > 60) r.fail("probe.max_doublings", "must be in [2, 60]");

  AuditConfig& a = cfg.audit;
  a.N = static_cast<int>(r.integer("audit.N", a.N));
  a.trials = r.integer("audit.trials", a.trials);
  a.box = r.num("audit.box", a.box);
  a.seed = static_cast<std::uint64_t>(r.integer("audit.seed", 1));
  if (a.N < 2 || a.N > 64) r.fail("audit.N", "must be in [2, 64]");
  if (a.trials < 1 || a.trials > 100000) r.fail("audit.trials", "must be in [1, 100000]");
  if (!(a.box > 0.0)) r.fail("audit.box", "must be positive");

  // Cross-field checks that need the constructed objects.
  try {
    if (cfg.mode == Mode::HartreeStudy || cfg.mode == Mode::PotentialAudit) build_potential(cfg);
    if (cfg.mode != Mode::HartreeStudy && cfg.mode != Mode::PotentialAudit) build_symbol(cfg);
  } catch (const Error& e) {
    r.fail(cfg.mode == Mode::HartreeStudy || cfg.mode == Mode::PotentialAudit ? "interaction.potential"
                                                                            : "interaction.symbol",
           e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string prepare_output_dir(const RunConfig& cfg) {
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("DIPGP_OUTPUT_DIR"); env && *env) dir = env;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto probe = std::filesystem::path(dir) / ".dipgp-write-test";
  std::ofstream out(probe);
  if (!out) throw Error(ErrorCode::ConfigError, "output_dir '" + dir + "' is not writable");
  out.close();
  std::filesystem::remove(probe, ec);
  return dir;
}

TrapSpec build_trap(const RunConfig& cfg) {
  const TrapConfig& t = cfg.trap;
  TrapSpec trap;
  if (t.type == "harmonic") trap = harmonic_trap({t.omega2, t.omega2, t.omega2});
  else if (t.type == "anisotropic-harmonic") trap = harmonic_trap(t.omega2_axes);
  else trap = quartic_trap(t.kappa);
  if (t.gauge == "uniform-rotation") trap = with_rotation(trap, t.omega_rot);
  return trap;
}

AngularSymbol build_symbol(const RunConfig& cfg) {
  const InteractionConfig& in = cfg.interaction;
  if (in.symbol == "dipolar") return dipolar_symbol(in.axis);
  AngularSymbol s = AngularSymbol::zonal(in.axis, in.coefficients);
  if (!s.is_even()) throw Error(ErrorCode::InvalidArgument, "custom symbol must be even");
  const double residual = check_cancellation(s, kCancellationOrder);
  if (std::abs(residual) > kCancellationTol) {
    throw Error(ErrorCode::NonCancelingSymbol,
                "custom symbol has spherical mean " + std::to_string(residual));
  }
  return s;
}

PairPotential build_potential(const RunConfig& cfg) {
  const InteractionConfig& in = cfg.interaction;
  if (in.potential == "w_dip") return make_w_dip(in.d, in.axis);
  if (in.potential == "wtilde_dip") {
    if (norm(in.axis - kE3) > 1e-12) {
      throw Error(ErrorCode::InvalidAxis, "wtilde_dip is defined for axis e3 only");
    }
    return make_wtilde_dip(in.d);
  }
  if (in.potential == "gaussian") return make_gaussian(in.gaussian_mass, in.gaussian_sigma);
  if (in.potential == "composite") {
    return make_composite(in.d, in.axis, in.gaussian_mass, in.gaussian_sigma);
  }
  if (in.potential == "stabilizer") return make_stabilizer(in.stabilizer_mu, in.stabilizer_lambda);
  return zero_potential();
}

}  // namespace dipgp
