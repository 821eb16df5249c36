#include <cmath>
#include <random>

#include "doctest.h"
#include "dipgp/error.hpp"
#include "dipgp/grid.hpp"
#include "helpers.hpp"

using namespace dipgp;
using testutil::kPi;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

RealField gaussian_density(const BoxGrid& g, Vec3 var) {
  const double norm = std::pow(2.0 * kPi, -1.5) / std::sqrt(var.x * var.y * var.z);
  return sample_real(g, [&](const Vec3& x) {
    return norm * std::exp(-0.5 * (x.x * x.x / var.x + x.y * x.y / var.y + x.z * x.z / var.z));
  });
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("box grid invariants") {
  const BoxGrid g(10.0, 16);
  CHECK(g.spacing() * g.points_per_axis() == 10.0);
  CHECK(g.size() == 4096);
  CHECK_THROWS_AS(BoxGrid(10.0, 6), Error);
  CHECK_THROWS_AS(BoxGrid(10.0, 24), Error);
  CHECK_THROWS_AS(BoxGrid(-1.0, 16), Error);
  const auto ks = g.wavevectors();
  REQUIRE(ks.size() == 16);
  CHECK(ks.front() == doctest::Approx(-8.0 * 2.0 * kPi / 10.0));
  for (int q = 1; q < 8; ++q) CHECK(g.wavenumber(q) == doctest::Approx(-g.wavenumber(16 - q)));
  CHECK(g.derivative_wavenumber(8) == 0.0);
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{4095}}) {
    CHECK(g.mirror(g.mirror(i)) == i);
  }
}

TEST_CASE("integration") {
  const BoxGrid g(10.0, 16);
  CHECK(integrate(sample_real(g, [](const Vec3&) { return 1.0; })) == doctest::Approx(1000.0).epsilon(1e-14));
  const BoxGrid h(16.0, 64);
  const double gauss = integrate(
      sample_real(h, [](const Vec3& x) { return std::pow(kPi, -1.5) * std::exp(-dot(x, x)); }));
  CHECK(std::abs(gauss - 1.0) <= 1e-10);
  const double odd = integrate(sample_real(h, [](const Vec3& x) {
    return x.x * std::exp(-dot(x, x)) * (1.0 + x.y * x.y);
  }));
  CHECK(std::abs(odd) <= 1e-12);
}

TEST_CASE("transform conventions") {
  const BoxGrid g(10.0, 16);
  const Field one = sample(g, [](const Vec3&) { return cplx(1.0); });
  const Field F = dft(one);
  const std::size_t zero = g.index(0, 0, 0);
  CHECK(std::abs(F.values[zero] - cplx(1000.0)) <= 1e-10);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i != zero) CHECK(std::abs(F.values[i]) <= 1e-10);
  }
  CHECK(norm(g.wavevector(zero)) == 0.0);

  const Field r = testutil::random_field(g, 1);
  CHECK(max_abs_diff(idft(dft(r)), r) <= 1e-12 * 4.0);

  // Plane wave with lattice wavevector (2, -3, 1) * 2π/L.
  const Vec3 k0 = (2.0 * kPi / 10.0) * Vec3{2.0, -3.0, 1.0};
  const Field pw = sample(g, [&](const Vec3& x) { return std::polar(1.0, dot(k0, x)); });
  const Field P = dft(pw);
  int nonzero = 0;
  std::size_t where = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(P.values[i]) > 1e-9) {
      ++nonzero;
      where = i;
    }
  }
  CHECK(nonzero == 1);
  CHECK(norm(g.wavevector(where) - k0) <= 1e-12);
}

TEST_CASE("Parseval") {
  const BoxGrid g(7.0, 16);
  const double L3 = std::pow(7.0, 3);
  for (unsigned s = 0; s < 20; ++s) {
    const Field f = testutil::random_field(g, 100 + s);
    const Field F = dft(f);
    double lhs = 0.0, rhs = 0.0;
    for (const cplx& v : f.values) lhs += std::norm(v);
    for (const cplx& v : F.values) rhs += std::norm(v);
    lhs *= g.cell_volume();
    rhs /= L3;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
  }
}

TEST_CASE("spectral gradient") {
  const BoxGrid g(10.0, 16);
  const Vec3 k0 = (2.0 * kPi / 10.0) * Vec3{1.0, 2.0, -3.0};
  const Field pw = sample(g, [&](const Vec3& x) { return std::polar(1.0, dot(k0, x)); });
  const auto d = gradient_spectral(pw);
  for (int j = 0; j < 3; ++j) {
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      err = std::max(err, std::abs(d[j].values[i] - cplx(0.0, k0[j]) * pw.values[i]));
    }
    CHECK(err <= 1e-12);
  }
  const auto d1 = gradient_spectral(sample(g, [](const Vec3&) { return cplx(1.0); }));
  for (int j = 0; j < 3; ++j) {
    for (const cplx& v : d1[j].values) CHECK(std::abs(v) <= 1e-14);
  }

  const BoxGrid h(16.0, 64);
  const Field gauss = sample(h, [](const Vec3& x) { return cplx(std::exp(-0.5 * dot(x, x))); });
  const auto dg = gradient_spectral(gauss);
  for (int j = 0; j < 3; ++j) {
    double err = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec3 x = h.point(i);
      err = std::max(err, std::abs(dg[j].values[i] - (-x[j]) * gauss.values[i]));
    }
    CHECK(err <= 1e-8);
  }
}

TEST_CASE("normalize") {
  const BoxGrid g(8.0, 16);
  Field u = testutil::smooth_random_field(g, 2);
  const double m = mass(u);
  for (auto& v : u.values) v *= 2.0 / std::sqrt(m);
  CHECK(mass(u) == doctest::Approx(4.0).epsilon(1e-13));
  const Field n = normalize(u);
  CHECK(std::abs(mass(n) - 1.0) <= 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(n.values[i] - 0.5 * u.values[i]) <= 1e-15);
  CHECK(max_abs_diff(normalize(n), n) <= 1e-14);
  CHECK(std::abs(mass(normalize(testutil::random_field(g, 9))) - 1.0) <= 1e-12);
  try {
    normalize(Field(g));
    FAIL("zero field accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroField);
  }
}

TEST_CASE("dipolar multiplier grid") {
  const BoxGrid g(12.0, 16);
  const MultiplierGrid m = multiplier_from_symbol(g, dipolar_symbol(kE3));
  CHECK(m.values[g.index(0, 0, 0)] == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(m.values[i] >= -4.0 * kPi / 3.0 - 1e-8);
    CHECK(m.values[i] <= 8.0 * kPi / 3.0 + 1e-8);
    CHECK(m.values[i] == m.values[g.mirror(i)]);
  }
  const AngularSymbol gen = AngularSymbol::general([](const Vec3& w) { return 1.0 - 3.0 * w.z * w.z; });
  CHECK_THROWS_AS(multiplier_from_symbol(g, gen), Error);
}

TEST_CASE("multiplier convolution") {
  const BoxGrid g(16.0, 32);
  const RealField rho = gaussian_density(g, {0.5, 0.5, 0.5});
  MultiplierGrid id{g, std::vector<double>(g.size(), 1.0)};
  const Convolution c = convolve_multiplier(rho, id);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(c.field.values[i] - rho.values[i]) <= 1e-14);
  CHECK(c.imag_residual <= 1e-10);

  const MultiplierGrid K = multiplier_from_symbol(g, dipolar_symbol(kE3));
  auto pair = [&](const RealField& a, const RealField& b) {
    const RealField ka = convolve_multiplier(a, K).field;
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += ka.values[i] * b.values[i];
    return s * g.cell_volume();
  };
  CHECK(std::abs(pair(rho, rho)) <= 1e-8);

  // Radial x angular quadrature oracle for variances (0.5, 0.5, 1.5). The lattice
  // sum of a multiplier that jumps at k = 0 carries an O(L^-3) error.
  const RealField prolate = gaussian_density(g, {0.5, 0.5, 1.5});
  const double e = pair(prolate, prolate);
  CHECK(e < 0.0);
  CHECK(e == doctest::Approx(-0.060540871061131735).epsilon(2e-3));

  const RealField other = gaussian_density(g, {1.0, 0.3, 0.7});
  CHECK(std::abs(pair(prolate, other) - pair(other, prolate)) <= 1e-10);

  const BoxGrid g2(16.0, 16);
  CHECK_THROWS_AS(convolve_multiplier(sample_real(g2, [](const Vec3&) { return 1.0; }), K), Error);
}

TEST_CASE("multiplier positivity transfers to the quadratic form") {
  const BoxGrid g(12.0, 32);
  const MultiplierGrid K = multiplier_from_symbol(g, dipolar_symbol(kE3));
  const double a = 4.0 * kPi / 3.0 + 1e-3, b = 1.0;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const Field u = testutil::smooth_random_field(g, 50 + t, 4);
    RealField rho(g);
    for (std::size_t i = 0; i < g.size(); ++i) rho.values[i] = std::norm(u.values[i]);
    const RealField kr = convolve_multiplier(rho, K).field;
    double q = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) q += (a * rho.values[i] + b * kr.values[i]) * rho.values[i];
    CHECK(q * g.cell_volume() >= -1e-10);
  }
}

}  // TEST_SUITE
