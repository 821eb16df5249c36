#include "dipgp/simd.hpp"

namespace dipgp::simd {
namespace {

double sum_abs2_scalar(const cplx* u, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(u[i]);
  return s;
}

void abs2_scalar(const cplx* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = u[i].real(), im = u[i].imag();
    out[i] = re * re + im * im;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

cplx cdot_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

void scale_scalar(const double* r, const cplx* u, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = cplx(r[i] * u[i].real(), r[i] * u[i].imag());
}

void scale_imag_scalar(const double* r, const cplx* u, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = cplx(-r[i] * u[i].imag(), r[i] * u[i].real());
}

void axpby_scalar(double alpha, const cplx* x, double beta, const cplx* y, cplx* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cplx(alpha * x[i].real() + beta * y[i].real(),
                  alpha * x[i].imag() + beta * y[i].imag());
  }
}

void mul_add_scalar(const cplx* base, const double* r, const cplx* u, cplx* out,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cplx(base[i].real() + r[i] * u[i].real(), base[i].imag() + r[i] * u[i].imag());
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{sum_abs2_scalar, abs2_scalar,  dot_scalar,
                                 cdot_scalar,     scale_scalar, scale_imag_scalar,
                                 axpby_scalar,    mul_add_scalar};
  return table;
}

}  // namespace dipgp::simd
