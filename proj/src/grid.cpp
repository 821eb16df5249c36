#include "dipgp/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "dipgp/error.hpp"
#include "dipgp/simd.hpp"

namespace dipgp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

fftw_plan plan_for(int M, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(M, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  const std::size_t n = static_cast<std::size_t>(M) * M * M;
  fftw_complex* a = fftw_alloc_complex(n);
  fftw_complex* b = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_3d(M, M, M, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  if (!p) throw Error(ErrorCode::InternalConsistency, "FFTW planning failed");
  plans.emplace(key, p);
  return p;
}

void execute(std::span<const cplx> in, std::span<cplx> out, int M, int sign) {
  if (in.size() != out.size() || in.size() != static_cast<std::size_t>(M) * M * M) {
    throw Error(ErrorCode::GridMismatch, "transform buffer size does not match grid");
  }
  if (in.data() == out.data()) {
    std::vector<cplx> copy(in.begin(), in.end());
    execute(copy, out, M, sign);
    return;
  }
  // FFTW never writes to the input of an out-of-place complex DFT.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  fftw_execute_dft(plan_for(M, sign), src, reinterpret_cast<fftw_complex*>(out.data()));
}

// (-1)^(qx+qy+qz): the e^{ik·L/2} phase from the box offset.
template <class F>
void for_each_parity(const BoxGrid& g, F&& f) {
  const int M = g.points_per_axis();
  std::size_t idx = 0;
  for (int ix = 0; ix < M; ++ix)
    for (int iy = 0; iy < M; ++iy)
      for (int iz = 0; iz < M; ++iz, ++idx) f(idx, ((ix + iy + iz) & 1) != 0);
}

}  // namespace

BoxGrid::BoxGrid(double side_length, int points_per_axis) : L_(side_length), M_(points_per_axis) {
  if (!(std::isfinite(side_length) && side_length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "box side length must be positive and finite");
  }
  if (points_per_axis < 8 || !is_power_of_two(points_per_axis)) {
    throw Error(ErrorCode::InvalidArgument, "points per axis must be a power of two >= 8");
  }
}

double BoxGrid::cell_volume() const {
  const double h = spacing();
  return h * h * h;
}

Vec3 BoxGrid::point(std::size_t index) const {
  const auto M = static_cast<std::size_t>(M_);
  return point(static_cast<int>(index / (M * M)), static_cast<int>((index / M) % M),
               static_cast<int>(index % M));
}

std::size_t BoxGrid::mirror(std::size_t index) const {
  const auto M = static_cast<std::size_t>(M_);
  const std::size_t ix = index / (M * M), iy = (index / M) % M, iz = index % M;
  return ((M - ix) % M * M + (M - iy) % M) * M + (M - iz) % M;
}

double BoxGrid::wavenumber(int q) const { return kTwoPi / L_ * (q < M_ / 2 ? q : q - M_); }

double BoxGrid::derivative_wavenumber(int q) const { return q == M_ / 2 ? 0.0 : wavenumber(q); }

Vec3 BoxGrid::wavevector(std::size_t index) const {
  const auto M = static_cast<std::size_t>(M_);
  return {wavenumber(static_cast<int>(index / (M * M))),
          wavenumber(static_cast<int>((index / M) % M)), wavenumber(static_cast<int>(index % M))};
}

std::vector<double> BoxGrid::wavevectors() const {
  std::vector<double> k(M_);
  for (int j = 0; j < M_; ++j) k[j] = kTwoPi / L_ * (j - M_ / 2);
  return k;
}

Field::Field(const BoxGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "field size != M^3");
}

RealField::RealField(const BoxGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "field size != M^3");
}

void require_same_grid(const BoxGrid& a, const BoxGrid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "operands live on different grids");
}

Field sample(const BoxGrid& grid, const std::function<cplx(const Vec3&)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.point(i));
  return out;
}

RealField sample_real(const BoxGrid& grid, const std::function<double(const Vec3&)>& f) {
  RealField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.point(i));
  return out;
}

cplx integrate(const Field& f) {
  cplx s = 0.0;
  for (const cplx& v : f.values) s += v;
  return s * f.grid.cell_volume();
}

double integrate(const RealField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

double mass(const Field& u) { return simd::sum_abs2(u.values) * u.grid.cell_volume(); }

Field normalize(const Field& u) {
  const double m = mass(u);
  if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorCode::ZeroField, "cannot normalize");
  Field out(u.grid);
  const double s = 1.0 / std::sqrt(m);
  std::vector<double> r(u.values.size(), s);
  simd::scale(r, u.values, out.values);
  return out;
}

namespace fft {
void forward(std::span<const cplx> in, std::span<cplx> out, int M) {
  execute(in, out, M, FFTW_FORWARD);
}
void backward(std::span<const cplx> in, std::span<cplx> out, int M) {
  execute(in, out, M, FFTW_BACKWARD);
}
}  // namespace fft

Field dft(const Field& f) {
  Field F(f.grid);
  fft::forward(f.values, F.values, f.grid.points_per_axis());
  const double h3 = f.grid.cell_volume();
  for_each_parity(f.grid, [&](std::size_t i, bool odd) { F.values[i] *= odd ? -h3 : h3; });
  return F;
}

Field idft(const Field& F) {
  Field phased(F.grid);
  const double L = F.grid.side_length();
  const double s = 1.0 / (L * L * L);
  for_each_parity(F.grid,
                  [&](std::size_t i, bool odd) { phased.values[i] = F.values[i] * (odd ? -s : s); });
  Field f(F.grid);
  fft::backward(phased.values, f.values, F.grid.points_per_axis());
  return f;
}

std::array<Field, 3> gradient_spectral(const Field& f) {
  const BoxGrid& g = f.grid;
  const int M = g.points_per_axis();
  const std::size_t n = g.size();
  std::vector<cplx> spec(n);
  fft::forward(f.values, spec, M);
  const double inv = 1.0 / static_cast<double>(n);
  std::array<Field, 3> out{Field(g), Field(g), Field(g)};
  std::vector<double> k(n);
  std::vector<cplx> tmp(n);
  for (int axis = 0; axis < 3; ++axis) {
    std::size_t idx = 0;
    for (int ix = 0; ix < M; ++ix)
      for (int iy = 0; iy < M; ++iy)
        for (int iz = 0; iz < M; ++iz, ++idx) {
          const int q = axis == 0 ? ix : (axis == 1 ? iy : iz);
          k[idx] = g.derivative_wavenumber(q) * inv;
        }
    simd::scale_imag(k, spec, tmp);
    fft::backward(tmp, out[axis].values, M);
  }
  return out;
}

Field apply_symbol(const Field& f, std::span<const double> symbol) {
  if (symbol.size() != f.grid.size()) throw Error(ErrorCode::GridMismatch, "symbol size");
  const int M = f.grid.points_per_axis();
  std::vector<cplx> spec(f.grid.size());
  fft::forward(f.values, spec, M);
  std::vector<double> r(symbol.begin(), symbol.end());
  const double inv = 1.0 / static_cast<double>(f.grid.size());
  for (double& v : r) v *= inv;
  simd::scale(r, spec, spec);
  Field out(f.grid);
  fft::backward(spec, out.values, M);
  return out;
}

MultiplierGrid multiplier_from_symbol(const BoxGrid& grid, const AngularSymbol& omega) {
  MultiplierGrid m{grid, std::vector<double>(grid.size())};
  if (omega.kind() == AngularSymbol::Kind::General) {
    throw Error(ErrorCode::InvalidArgument,
                "multiplier grids need a dipolar or zonal (polynomial) symbol");
  }
  if (omega.kind() == AngularSymbol::Kind::Dipolar) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      m.values[i] = khat_closed_dipolar(grid.wavevector(i), omega.axis());
    }
  } else {
    const ZonalMultiplier khat(omega);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const Vec3 k = grid.wavevector(i);
      m.values[i] = khat(dot(omega.axis(), k) / norm(k));
    }
  }
  std::vector<double> sym(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sym[i] = 0.5 * (m.values[i] + m.values[grid.mirror(i)]);
  }
  m.values = std::move(sym);
  return m;
}

MultiplierGrid multiplier_from_function(const BoxGrid& grid,
                                        const std::function<double(const Vec3&)>& fhat) {
  std::vector<double> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) raw[i] = fhat(grid.wavevector(i));
  MultiplierGrid m{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m.values[i] = 0.5 * (raw[i] + raw[grid.mirror(i)]);
  }
  return m;
}

Convolution convolve_multiplier(const RealField& rho, const MultiplierGrid& m) {
  require_same_grid(rho.grid, m.grid);
  Field c(rho.grid);
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] = rho.values[i];
  Field out = apply_symbol(c, m.values);
  Convolution r{RealField(rho.grid), 0.0};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    r.field.values[i] = out.values[i].real();
    r.imag_residual = std::max(r.imag_residual, std::abs(out.values[i].imag()));
  }
  return r;
}

double boundary_density(const Field& u) {
  const int M = u.grid.points_per_axis();
  double mx = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      mx = std::max({mx, std::norm(u.values[u.grid.index(0, a, b)]),
                     std::norm(u.values[u.grid.index(a, 0, b)]),
                     std::norm(u.values[u.grid.index(a, b, 0)])});
    }
  return mx;
}

}  // namespace dipgp
