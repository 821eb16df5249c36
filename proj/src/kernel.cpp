#include "dipgp/kernel.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "dipgp/error.hpp"

namespace dipgp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Innermost breakpoint of the graded cosθ mesh; [0, kSliver] is done analytically.
constexpr int kGradedLevels = 40;
const double kSliver = std::ldexp(1.0, -kGradedLevels);

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
  GaussLegendre rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, i, &rule.x[i], &rule.w[i], table);
  }
  gsl_integration_glfixed_table_free(table);
  return cache.emplace(n, std::move(rule)).first->second;
}

void require_unit(Vec3 n) {
  if (!std::isfinite(norm(n)) || std::abs(norm(n) - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidAxis, "axis must be a unit vector");
  }
}

void require_nonzero(Vec3 k) {
  if (k == Vec3{}) throw Error(ErrorCode::SingularOrigin, "multiplier is undefined at k = 0");
}

// Azimuthal integral G(t) = ∫_0^{2π} Ω(t w + sqrt(1-t^2)(cos φ u + sin φ v)) dφ
// by the trapezoid rule, which is spectrally accurate for periodic integrands.
class AzimuthalIntegrator {
 public:
  AzimuthalIntegrator(const AngularSymbol& omega, Vec3 axis, int n_phi)
      : omega_(omega), frame_(frame_around(axis)), cos_(n_phi), sin_(n_phi) {
    for (int j = 0; j < n_phi; ++j) {
      const double phi = kTwoPi * j / n_phi;
      cos_[j] = std::cos(phi);
      sin_[j] = std::sin(phi);
    }
  }

  double operator()(double t) const {
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    double sum = 0.0;
    for (std::size_t j = 0; j < cos_.size(); ++j) {
      sum += omega_(t * frame_.w + s * (cos_[j] * frame_.u + sin_[j] * frame_.v));
    }
    return sum * kTwoPi / static_cast<double>(cos_.size());
  }

  // G(t) + G(-t): the integrands below depend on |t| only.
  double symmetric(double t) const { return (*this)(t) + (*this)(-t); }

 private:
  const AngularSymbol& omega_;
  Frame frame_;
  std::vector<double> cos_, sin_;
};

double cancellation_integral(const AngularSymbol& omega, int quad_order) {
  const GaussLegendre& gl = gauss_legendre(quad_order);
  AzimuthalIntegrator g(omega, omega.axis(), 2 * quad_order);
  double sum = 0.0;
  for (int i = 0; i < quad_order; ++i) sum += gl.w[i] * g(gl.x[i]);
  return sum;
}

void require_canceling(const AngularSymbol& omega) {
  if (!omega.is_even()) throw Error(ErrorCode::InvalidArgument, "symbol is not even");
  const double residual = cancellation_integral(omega, kCancellationOrder);
  if (!(std::abs(residual) <= kCancellationTol)) {
    throw Error(ErrorCode::NonCancelingSymbol,
                "spherical mean of the symbol is " + std::to_string(residual));
  }
}

// Breakpoints 1 > 1/2 > ... > 2^-40, each panel split so its width is at most max_width.
std::vector<double> graded_breakpoints(double max_width) {
  std::vector<double> pts{1.0};
  for (int level = 0; level < kGradedLevels; ++level) {
    const double hi = std::ldexp(1.0, -level);
    const double lo = 0.5 * hi;
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
    for (int p = 1; p <= pieces; ++p) pts.push_back(hi - (hi - lo) * p / pieces);
  }
  return pts;
}

template <class F>
double integrate_panels(const std::vector<double>& pts, const GaussLegendre& gl, F&& f) {
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double hi = pts[p], lo = pts[p + 1];
    const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * f(mid + half * gl.x[i]);
    total += half * s;
  }
  return total;
}

}  // namespace

AngularSymbol AngularSymbol::dipolar(Vec3 n) {
  require_unit(n);
  AngularSymbol s = zonal(n, {1.0, 0.0, -3.0});
  s.kind_ = Kind::Dipolar;
  return s;
}

AngularSymbol AngularSymbol::zonal(Vec3 n, std::vector<double> coeffs) {
  require_unit(n);
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
  }
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  AngularSymbol s;
  s.kind_ = Kind::Zonal;
  s.axis_ = n;
  s.is_even_ = true;
  for (std::size_t j = 1; j < coeffs.size(); j += 2) {
    if (coeffs[j] != 0.0) s.is_even_ = false;
  }
  s.coeffs_ = std::move(coeffs);
  return s;
}

AngularSymbol AngularSymbol::general(Fn fn, Vec3 axis) {
  require_unit(axis);
  if (!fn) throw Error(ErrorCode::InvalidArgument, "empty symbol callable");
  AngularSymbol s;
  s.kind_ = Kind::General;
  s.axis_ = axis;
  s.fn_ = std::move(fn);
  for (const Vec3& w : fibonacci_sphere(200)) {
    const double a = s.fn_(w), b = s.fn_(-w);
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      s.is_even_ = false;
      break;
    }
  }
  return s;
}

double AngularSymbol::operator()(const Vec3& omega) const {
  if (kind_ == Kind::General) return fn_(omega);
  const double c = dot(axis_, omega);
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * c + *it;
  return v;
}

double check_cancellation(const AngularSymbol& omega, int quad_order) {
  if (quad_order < 6) throw Error(ErrorCode::InvalidArgument, "quad_order must be at least 6");
  const double r = cancellation_integral(omega, quad_order);
  omega.residual_->store(r);
  return r;
}

double khat_closed_dipolar(Vec3 k, Vec3 n) {
  require_unit(n);
  require_nonzero(k);
  const double c = dot(n, k) / norm(k);
  return (4.0 * kPi / 3.0) * (3.0 * c * c - 1.0);
}

double khat_quadrature(const AngularSymbol& omega, Vec3 k, int quad_order) {
  require_nonzero(k);
  if (quad_order < 6) throw Error(ErrorCode::InvalidArgument, "quad_order must be at least 6");
  require_canceling(omega);
  const GaussLegendre& gl = gauss_legendre(quad_order);
  AzimuthalIntegrator g(omega, normalized(k), 2 * quad_order);
  const double body = integrate_panels(graded_breakpoints(1.0), gl,
                                       [&](double t) { return -std::log(t) * g.symmetric(t); });
  // ∫_0^ε -log t dt = ε - ε log ε, with G frozen at t = 0.
  const double sliver = g.symmetric(0.0) * (kSliver - kSliver * std::log(kSliver));
  return body + sliver;
}

double khat_truncated(const AngularSymbol& omega, Vec3 k, double R, double R_prime,
                      int quad_order) {
  require_nonzero(k);
  if (quad_order < 6) throw Error(ErrorCode::InvalidArgument, "quad_order must be at least 6");
  if (!(R >= 0.0) || std::isnan(R_prime)) {
    throw Error(ErrorCode::InvalidArgument, "radii must be nonnegative");
  }
  if (R > R_prime) throw Error(ErrorCode::EmptyShell, "inner radius exceeds outer radius");
  if (R == R_prime) return 0.0;
  require_canceling(omega);

  const double kk = norm(k);
  const bool open = std::isinf(R_prime);
  // cos(r k·ω) - cos(r|k|) integrates in r to Cin differences; the subtracted
  // term is direction-independent and drops out against ∫Ω = 0.
  const double outer_b = open ? 0.0 : cin(kk * R_prime);
  const double inner_b = cin(kk * R);
  auto radial = [&](double t) {
    const double a = kk * t;
    const double outer = open ? -std::log(t) : outer_b - cin(a * R_prime);
    return outer + cin(a * R) - inner_b;
  };

  const double reach = open ? R : R_prime;
  double width = 0.25;
  if (reach > 0.0) width = std::min(width, kPi / (kk * reach));
  const GaussLegendre& gl = gauss_legendre(quad_order);
  AzimuthalIntegrator g(omega, normalized(k), 2 * quad_order);
  const double body = integrate_panels(graded_breakpoints(width), gl,
                                       [&](double t) { return radial(t) * g.symmetric(t); });
  double sliver;
  if (open) {
    sliver = g.symmetric(0.0) * (kSliver - kSliver * std::log(kSliver) - kSliver * inner_b);
  } else {
    sliver = g.symmetric(0.0) * kSliver * (outer_b - inner_b);
  }
  return body + sliver;
}

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts;
  pts.reserve(std::max(n, 0));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return pts;
}

Extrema khat_extrema(const AngularSymbol& omega, int n_directions) {
  if (n_directions < 100) throw Error(ErrorCode::InvalidArgument, "n_directions must be >= 100");
  std::vector<Vec3> dirs = fibonacci_sphere(n_directions);
  const Frame f = frame_around(omega.axis());
  dirs.insert(dirs.end(), {f.w, -f.w, f.u, f.v});

  std::function<double(const Vec3&)> value;
  std::unique_ptr<ZonalMultiplier> zonal;
  switch (omega.kind()) {
    case AngularSymbol::Kind::Dipolar:
      value = [&](const Vec3& k) { return khat_closed_dipolar(k, omega.axis()); };
      break;
    case AngularSymbol::Kind::Zonal:
      zonal = std::make_unique<ZonalMultiplier>(omega);
      value = [&](const Vec3& k) { return (*zonal)(dot(omega.axis(), k)); };
      break;
    case AngularSymbol::Kind::General:
      value = [&](const Vec3& k) { return khat_quadrature(omega, k); };
      break;
  }
  Extrema e{kInfinity, -kInfinity};
  for (const Vec3& d : dirs) {
    const double v = value(d);
    e.inf = std::min(e.inf, v);
    e.sup = std::max(e.sup, v);
  }
  return e;
}

double cin(double x) {
  x = std::abs(x);
  if (x <= 4.0) {
    // Σ_{n≥1} (-1)^{n+1} x^{2n} / (2n (2n)!)
    const double x2 = x * x;
    double p = 0.5 * x2;  // x^{2n}/(2n)!
    double sum = 0.0;
    for (int n = 1; n < 60; ++n) {
      const double term = p / (2.0 * n);
      sum += (n % 2 == 1) ? term : -term;
      if (term < 1e-18 * sum) break;
      p *= x2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    return sum;
  }
  return std::numbers::egamma + std::log(x) - gsl_sf_Ci(x);
}

ZonalMultiplier::ZonalMultiplier(const AngularSymbol& omega, int quad_order) {
  if (omega.kind() == AngularSymbol::Kind::General) {
    throw Error(ErrorCode::InvalidArgument, "zonal multiplier needs a zonal symbol");
  }
  const int degree = std::max<int>(0, static_cast<int>(omega.zonal_coefficients().size()) - 1);
  const int m = degree + 1;
  const Frame f = frame_around(omega.axis());
  for (int i = 0; i < m; ++i) {
    const double theta = kPi * (2.0 * i + 1.0) / (2.0 * m);
    const double c = std::cos(theta);
    nodes_.push_back(c);
    weights_.push_back(((i % 2 == 0) ? 1.0 : -1.0) * std::sin(theta));
    const Vec3 k = c * f.w + std::sqrt(std::max(0.0, 1.0 - c * c)) * f.u;
    values_.push_back(khat_quadrature(omega, k, quad_order));
  }
}

double ZonalMultiplier::operator()(double c) const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double diff = c - nodes_[i];
    if (diff == 0.0) return values_[i];
    const double t = weights_[i] / diff;
    num += t * values_[i];
    den += t;
  }
  return num / den;
}

}  // namespace dipgp
