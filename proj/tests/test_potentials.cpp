#include <cmath>
#include <random>

#include "doctest.h"
#include "dipgp/error.hpp"
#include "dipgp/grid.hpp"
#include "dipgp/potentials.hpp"
#include "helpers.hpp"

using namespace dipgp;
using testutil::kPi;

namespace {

std::vector<Vec3> random_vectors(int n, unsigned seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i) out.push_back({g(rng), g(rng), g(rng)});
  return out;
}

// max |dft(real samples) - ŵ| over the lattice, and max |ŵ|
std::pair<double, double> representation_mismatch(const BoxGrid& g, const PairPotential& w) {
  const Field F = dft(sample(g, [&](const Vec3& x) { return cplx(w.eval_real(x)); }));
  const MultiplierGrid m = multiplier_from_function(g, w.eval_fourier);
  double diff = 0.0, top = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    diff = std::max(diff, std::abs(F.values[i] - m.values[i]));
    top = std::max(top, std::abs(m.values[i]));
  }
  return {diff, top};
}

}  // namespace

TEST_SUITE("potentials") {

TEST_CASE("smeared Coulomb") {
  CHECK(smeared_coulomb(Vec3{}) == 1.0);
  CHECK(smeared_coulomb(Vec3{1e-9, 0.0, 0.0}) == doctest::Approx(1.0 - 0.5e-9).epsilon(1e-15));
  CHECK(smeared_coulomb(Vec3{0.0, 1.0, 0.0}) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(smeared_coulomb(Vec3{0.0, 0.0, 10.0}) == doctest::Approx(0.09999546000702375).epsilon(1e-14));
  // Series and direct formula agree across the switch radius.
  CHECK(smeared_coulomb_radial(1e-4 * (1 - 1e-12)) ==
        doctest::Approx(smeared_coulomb_radial(1e-4 * (1 + 1e-12))).epsilon(1e-12));
}

TEST_CASE("w_dip in real space") {
  CHECK(w_dip(Vec3{}, 1.0, kE3) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(w_dip(Vec3{}, 1.0, kE3) == doctest::Approx(0.735759).epsilon(1e-6));
  for (const Vec3& x : random_vectors(50, 3, 2.0)) {
    CHECK(w_dip(-x, 1.3, kE3) == doctest::Approx(w_dip(x, 1.3, kE3)).epsilon(1e-14));
  }
  CHECK(w_dip(Vec3{0.0, 0.0, 50.0}, 1.0, kE3) == doctest::Approx(-1.6e-5).epsilon(0.05));
  CHECK_THROWS_AS(make_w_dip(-1.0), Error);
}

TEST_CASE("w_dip far field follows d^2 K_dip") {
  const double d = 1.0;
  double C = 0.0;
  std::vector<double> products;
  for (double r = 30.0; r <= 60.0; r += 5.0) {
    double worst = 0.0;
    for (const Vec3& w : fibonacci_sphere(200)) {
      const double c = w.z;
      const double kdip = (1.0 - 3.0 * c * c) / (r * r * r);
      if (std::abs(1.0 - 3.0 * c * c) < 0.5) continue;
      worst = std::max(worst, std::abs(w_dip(r * w, d, kE3) / (d * d * kdip) - 1.0));
    }
    products.push_back(worst * r);
    C = std::max(C, worst * r);
  }
  // Error times |x| stays bounded: no growth from 30 to 60.
  CHECK(C <= 20.0);
  CHECK(products.back() <= 1.1 * products.front());
}

TEST_CASE("w_dip in Fourier space") {
  CHECK(w_dip_hat(Vec3{0.0, 0.0, kPi}, 1.0, kE3) ==
        doctest::Approx(16.0 / (kPi * (1.0 + kPi * kPi))).epsilon(1e-14));
  CHECK(w_dip_hat(Vec3{0.0, 0.0, kPi}, 1.0, kE3) == doctest::Approx(0.468525).epsilon(1e-4));
  CHECK(w_dip_hat(Vec3{}, 1.0, kE3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(w_dip_hat(Vec3{0.0, 0.0, 1e-5}, 1.0, kE3) == doctest::Approx(4.0 * kPi).epsilon(1e-8));
  for (const Vec3& k : random_vectors(500, 8, 3.0)) CHECK(w_dip_hat(k, 1.0, kE3) >= 0.0);
}

TEST_CASE("short-range strength") {
  for (double d : {0.5, 1.0, 2.0}) {
    const PairPotential w = make_w_dip(d);
    CAPTURE(d);
    CHECK(std::abs(short_range_strength(w.eval_fourier, d) - 4.0 * kPi / 3.0 * d * d) <= 1e-4);
  }
  const PairPotential g = make_gaussian(2.5, 0.7);
  CHECK(short_range_strength_b(g.eval_fourier, 0.0) == doctest::Approx(g.eval_fourier(Vec3{})).epsilon(1e-10));
  // Negative-b construction: a = -8πb/3 with b = -d^2.
  const PairPotential wt = make_wtilde_dip(1.0);
  CHECK(short_range_strength_b(wt.eval_fourier, -1.0) == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-6));
  const RealFn bad = [](const Vec3& k) { return 1.0 / dot(k, k); };
  CHECK_THROWS_AS(short_range_strength(bad, 1.0), Error);
}

TEST_CASE("negative-b construction") {
  for (const Vec3& k : random_vectors(500, 21, 3.0)) CHECK(wtilde_dip(k, 1.0) >= -1e-12);
  CHECK(wtilde_dip(Vec3{}, 1.0) == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(wtilde_dip(Vec3{0.0, 0.0, 2.0 * kPi}, 1.0) ==
        doctest::Approx(4.0 * kPi / (1.0 + 4.0 * kPi * kPi)).epsilon(1e-12));
  const PairPotential wt = make_wtilde_dip(1.0);
  CHECK_FALSE(wt.has_real());
  CHECK(wt.dipolar_coefficient == -1.0);
}

TEST_CASE("stabilizer") {
  const double mu = 1.5, lambda = 2.5;
  CHECK(stabilizer_psi_hat(Vec3{}, mu, lambda) == doctest::Approx(3.0 * mu / (lambda * lambda)).epsilon(1e-15));
  CHECK(stabilizer_psi(Vec3{}, mu, lambda) == doctest::Approx(mu * lambda / 2.0).epsilon(1e-15));
  for (double r = 0.1; r <= 10.0; r += 0.1) {
    const Vec3 x{0.0, r, 0.0};
    CHECK(stabilizer_psi(x, mu, lambda) <= mu * std::exp(-lambda * r / 2.0) / r);
  }
  for (const Vec3& p : random_vectors(500, 5, 4.0)) {
    const double p2 = dot(p, p);
    const double lower = 0.75 * lambda * lambda * mu / std::pow(p2 + lambda * lambda, 2);
    CHECK(stabilizer_psi_hat(p, mu, lambda) >= lower);
    CHECK(stabilizer_psi_hat(p, mu, lambda) > 0.0);
  }
  // ∫ψ = 4πμ ∫ r (e^{-λr/2} - e^{-λr}) dr = 12πμ/λ^2.
  const PairPotential s = make_stabilizer(mu, lambda);
  CHECK(s.eval_fourier(Vec3{}) == doctest::Approx(12.0 * kPi * mu / (lambda * lambda)).epsilon(1e-14));
  CHECK_THROWS_AS(make_stabilizer(mu, 0.5), Error);
  CHECK_THROWS_AS(make_stabilizer(-1.0, 2.0), Error);
}

TEST_CASE("gaussian representations agree") {
  const BoxGrid g(16.0, 64);
  const auto [diff, top] = representation_mismatch(g, make_gaussian(1.0, 1.0));
  CHECK(diff <= 1e-6 * top);
}

TEST_CASE("mean-field scaling") {
  const PairPotential w = make_w_dip(1.0);
  const PairPotential same = scale_potential(w, {0.4, 1});
  const PairPotential zero_beta = scale_potential(w, {0.0, 500});
  for (const Vec3& k : random_vectors(20, 2, 2.0)) {
    CHECK(same.eval_fourier(k) == w.eval_fourier(k));
    CHECK(zero_beta.eval_fourier(k) == w.eval_fourier(k));
    CHECK(same.eval_real(k) == doctest::Approx(w.eval_real(k)).epsilon(1e-15));
  }
  for (long N : {2L, 64L, 4096L}) {
    CHECK(scale_potential(w, {0.3, N}).eval_fourier(Vec3{}) == w.eval_fourier(Vec3{}));
  }
  CHECK(scale_potential(w, {1.0 / 3.0, 64}).dipolar_coefficient == w.dipolar_coefficient);

  // Gaussian, β = 1/3, N = 64: ŵ_N(k) = ŵ(k/4), compared with the grid transform.
  const PairPotential gs = make_gaussian(1.0, 1.0);
  const PairPotential gN = scale_potential(gs, {1.0 / 3.0, 64});
  CHECK(gN.eval_fourier(Vec3{0.0, 0.0, 4.0}) == doctest::Approx(gs.eval_fourier(kE3)).epsilon(1e-14));
  const auto [diff, top] = representation_mismatch(BoxGrid(8.0, 64), gN);
  CHECK(diff <= 1e-6 * top);
  CHECK(beta_threshold(2.0) == doctest::Approx(1.0 / 3.0 + 2.0 / 129.0).epsilon(1e-15));
}

TEST_CASE("classical stability probe") {
  const PairPotential w = make_w_dip(1.0);
  const StabilityProbeResult r = classical_stability_probe(w, 16, 2000, 10.0, 1);
  CHECK(r.bound_applies);
  CHECK(r.violations == 0);
  CHECK(r.positive_type_bound == doctest::Approx(-16.0 * 0.7357588823428847 / 2.0).epsilon(1e-12));
  CHECK(r.min_energy_per_particle * 16.0 >= r.positive_type_bound);

  const StabilityProbeResult z = classical_stability_probe(zero_potential(), 16, 200, 10.0, 1);
  CHECK(z.min_energy_per_particle == 0.0);

  // -Gaussian: the coincident configuration reaches -(N-1)/2 |w(0)| per particle.
  const PairPotential neg = make_gaussian(-1.0, 1.0);
  const double w0 = std::abs(neg.eval_real(Vec3{}));
  double prev = 0.0;
  for (int N : {4, 8, 16}) {
    const StabilityProbeResult p = classical_stability_probe(neg, N, 200, 10.0, 1);
    CAPTURE(N);
    CHECK_FALSE(p.bound_applies);
    CHECK(p.min_energy_per_particle <= -(N - 1) / 2.0 * w0 * (1.0 - 1e-12));
    CHECK(p.min_energy_per_particle < prev);
    prev = p.min_energy_per_particle;
  }

  CHECK_THROWS_AS(classical_stability_probe(make_wtilde_dip(1.0), 16, 10, 10.0), Error);
  CHECK_THROWS_AS(classical_stability_probe(w, 65, 10, 10.0), Error);
}

TEST_CASE("classical stability probe is reproducible") {
  const PairPotential w = make_composite(1.0, kE3, 1.0, 1.0);
  const auto a = classical_stability_probe(w, 12, 500, 8.0, 42);
  const auto b = classical_stability_probe(w, 12, 500, 8.0, 42);
  CHECK(a.min_energy_per_particle == b.min_energy_per_particle);
  CHECK(a.worst_configuration == b.worst_configuration);
}

TEST_CASE("traps") {
  const TrapSpec h = harmonic_trap();
  CHECK(h.V(Vec3{1.0, 2.0, 3.0}) == doctest::Approx(14.0));
  CHECK_FALSE(h.has_gauge());
  const TrapSpec aniso = harmonic_trap({1.0, 4.0, 0.25});
  CHECK(aniso.V(Vec3{1.0, 1.0, 2.0}) == doctest::Approx(1.0 + 4.0 + 1.0));
  const TrapSpec q = quartic_trap(0.5);
  CHECK(q.V(Vec3{0.0, 2.0, 0.0}) == doctest::Approx(8.0));
  CHECK(q.growth_exponent == 4.0);
  const TrapSpec rot = with_rotation(h, 0.4);
  REQUIRE(rot.has_gauge());
  const Vec3 A = rot.A(Vec3{1.0, 2.0, 3.0});
  CHECK(A.x == doctest::Approx(-0.4));
  CHECK(A.y == doctest::Approx(0.2));
  CHECK(A.z == 0.0);

  std::vector<Vec3> pts = random_vectors(1000, 17, 5.0);
  CHECK(trap_growth_holds(rot, 2.0, pts));
  CHECK(trap_growth_holds(q, 4.0, pts));
  // A growing faster than V breaks the bound.
  TrapSpec bad = h;
  bad.A = [](const Vec3& x) { return dot(x, x) * kE1; };
  CHECK_FALSE(trap_growth_holds(bad, 2.0, pts));
}

}  // TEST_SUITE

TEST_SUITE("representation") {

// Faithful check of the stated tolerance for w_dip. The lowest lattice modes carry
// the cube-truncated dipolar tail, which is scale invariant, so the bound is not
// met at any box size.
TEST_CASE("w_dip real samples transform to the closed form") {
  const BoxGrid g(16.0, 64);
  const auto [diff, top] = representation_mismatch(g, make_w_dip(1.0));
  CHECK(diff <= 1e-3 * top);
}

}  // TEST_SUITE
