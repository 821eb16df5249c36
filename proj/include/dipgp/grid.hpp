#pragma once

// Periodic cubic box [-L/2, L/2)^3 with M points per axis.
//
// Storage: index (ix*M + iy)*M + iz, so z varies fastest ("xyz" row-major).
// Point j on an axis sits at x_j = -L/2 + j*h, h = L/M.
// Transform convention: dft(f)(k) = h^3 Σ_j f_j e^{-i k·x_j}, which approximates
// f̂(k) = ∫ f e^{-ik·x} dx. Coefficients are stored in FFT order: index q on an
// axis holds k = 2π/L * (q < M/2 ? q : q - M). idft divides by L^3, so
// h^3 Σ|f|^2 = L^-3 Σ|dft(f)|^2.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dipgp/kernel.hpp"
#include "dipgp/vec3.hpp"

namespace dipgp {

using cplx = std::complex<double>;

class BoxGrid {
 public:
  BoxGrid() = default;
  BoxGrid(double side_length, int points_per_axis);

  double side_length() const { return L_; }
  int points_per_axis() const { return M_; }
  double spacing() const { return L_ / M_; }
  double cell_volume() const;
  std::size_t size() const { return static_cast<std::size_t>(M_) * M_ * M_; }

  double coord(int j) const { return -0.5 * L_ + j * spacing(); }
  Vec3 point(int ix, int iy, int iz) const { return {coord(ix), coord(iy), coord(iz)}; }
  Vec3 point(std::size_t index) const;
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * M_ + iy) * M_ + iz;
  }
  // Index of the lattice point -x (equivalently the mode -k), modulo M.
  std::size_t mirror(std::size_t index) const;

  // Signed wavenumber for FFT-order index q.
  double wavenumber(int q) const;
  // Same, with the Nyquist mode q = M/2 mapped to 0 (derivative symbols).
  double derivative_wavenumber(int q) const;
  Vec3 wavevector(std::size_t index) const;
  // 2π/L * {-M/2, ..., M/2-1}, ascending.
  std::vector<double> wavevectors() const;

  friend bool operator==(const BoxGrid&, const BoxGrid&) = default;

 private:
  double L_ = 0.0;
  int M_ = 0;
};

struct Field {
  BoxGrid grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(const BoxGrid& g) : grid(g), values(g.size()) {}
  Field(const BoxGrid& g, std::vector<cplx> v);
};

struct RealField {
  BoxGrid grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const BoxGrid& g) : grid(g), values(g.size()) {}
  RealField(const BoxGrid& g, std::vector<double> v);
};

// Real K̂ samples on the wavevector lattice, FFT order.
struct MultiplierGrid {
  BoxGrid grid;
  std::vector<double> values;
};

Field sample(const BoxGrid& grid, const std::function<cplx(const Vec3&)>& f);
RealField sample_real(const BoxGrid& grid, const std::function<double(const Vec3&)>& f);

cplx integrate(const Field& f);
double integrate(const RealField& f);
// h^3 Σ|u|^2
double mass(const Field& u);
Field normalize(const Field& u);

Field dft(const Field& f);
Field idft(const Field& F);

std::array<Field, 3> gradient_spectral(const Field& f);

// Multiplies the (unphased) spectrum of f by symbol, given in FFT order.
Field apply_symbol(const Field& f, std::span<const double> symbol);

// K̂ from a symbol; dipolar uses the closed form, zonal the interpolated
// quadrature. The k = 0 entry is 0.
MultiplierGrid multiplier_from_symbol(const BoxGrid& grid, const AngularSymbol& omega);
// Arbitrary real even Fourier function, k = 0 included; symmetrized over k ↔ -k
// so that the Nyquist planes stay consistent on the lattice.
MultiplierGrid multiplier_from_function(const BoxGrid& grid,
                                        const std::function<double(const Vec3&)>& fhat);

struct Convolution {
  RealField field;
  double imag_residual = 0.0;  // max |Im idft(m·dft(ρ))|
};
Convolution convolve_multiplier(const RealField& rho, const MultiplierGrid& m);

// Largest |u|^2 on the faces of the box.
double boundary_density(const Field& u);

void require_same_grid(const BoxGrid& a, const BoxGrid& b);

namespace fft {
// Raw in-place-free transforms: unnormalized, no phase factors.
void forward(std::span<const cplx> in, std::span<cplx> out, int M);
void backward(std::span<const cplx> in, std::span<cplx> out, int M);
}  // namespace fft

}  // namespace dipgp
