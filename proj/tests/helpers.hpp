#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "dipgp/grid.hpp"

namespace testutil {

using dipgp::cplx;

inline constexpr double kPi = std::numbers::pi;

// π^{-3/4} e^{-|x|^2/2}
inline dipgp::Field oscillator_state(const dipgp::BoxGrid& g) {
  return dipgp::sample(g, [](const dipgp::Vec3& x) {
    return cplx(std::pow(kPi, -0.75) * std::exp(-0.5 * dipgp::dot(x, x)));
  });
}

inline dipgp::Field random_field(const dipgp::BoxGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  dipgp::Field f(g);
  for (auto& v : f.values) v = cplx(n(rng), n(rng));
  return f;
}

// Smooth random field: Gaussian bumps with random complex weights and plane-wave phases.
inline dipgp::Field smooth_random_field(const dipgp::BoxGrid& g, unsigned seed, int bumps = 6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  struct Bump { dipgp::Vec3 c, q; cplx w; };
  std::vector<Bump> bs;
  for (int i = 0; i < bumps; ++i) {
    bs.push_back({{n(rng), n(rng), n(rng)}, {n(rng), n(rng), n(rng)}, cplx(n(rng), n(rng))});
  }
  return dipgp::sample(g, [&](const dipgp::Vec3& x) {
    cplx s = 0.0;
    for (const auto& b : bs) {
      const dipgp::Vec3 y = x - b.c;
      s += b.w * std::exp(-0.5 * dipgp::dot(y, y)) * std::polar(1.0, dipgp::dot(b.q, x));
    }
    return s;
  });
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil
