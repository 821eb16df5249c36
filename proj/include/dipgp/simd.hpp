#pragma once

// Pointwise and reduction kernels over grid data.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is chosen once at runtime from the CPU features; the
// DIPGP_SIMD environment variable ("scalar" or "avx2") overrides the choice.
// Elementwise kernels are bit-identical across backends; reductions agree to
// rounding (different summation order).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace dipgp::simd {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  double (*sum_abs2)(const cplx* u, std::size_t n);
  void (*abs2)(const cplx* u, double* out, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  cplx (*cdot)(const cplx* a, const cplx* b, std::size_t n);
  void (*scale)(const double* r, const cplx* u, cplx* out, std::size_t n);
  void (*scale_imag)(const double* r, const cplx* u, cplx* out, std::size_t n);
  void (*axpby)(double alpha, const cplx* x, double beta, const cplx* y, cplx* out, std::size_t n);
  void (*mul_add)(const cplx* base, const double* r, const cplx* u, cplx* out, std::size_t n);
};

const KernelTable& scalar_kernels();
// Only meaningful when backend_available(Backend::Avx2).
const KernelTable& avx2_kernels();

bool backend_available(Backend b);
Backend active_backend();
void set_backend(Backend b);
std::string_view backend_name(Backend b);

// Restores the previously active backend on scope exit.
class BackendGuard {
 public:
  explicit BackendGuard(Backend b) : saved_(active_backend()) { set_backend(b); }
  ~BackendGuard() { set_backend(saved_); }
  BackendGuard(const BackendGuard&) = delete;
  BackendGuard& operator=(const BackendGuard&) = delete;

 private:
  Backend saved_;
};

const KernelTable& kernels();

// sum |u_i|^2
double sum_abs2(std::span<const cplx> u);
// out_i = |u_i|^2
void abs2(std::span<const cplx> u, std::span<double> out);
// sum a_i b_i
double dot(std::span<const double> a, std::span<const double> b);
// sum conj(a_i) b_i
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);
// out_i = r_i u_i
void scale(std::span<const double> r, std::span<const cplx> u, std::span<cplx> out);
// out_i = i r_i u_i
void scale_imag(std::span<const double> r, std::span<const cplx> u, std::span<cplx> out);
// out_i = alpha x_i + beta y_i
void axpby(double alpha, std::span<const cplx> x, double beta, std::span<const cplx> y,
           std::span<cplx> out);
// out_i = base_i + r_i u_i
void mul_add(std::span<const cplx> base, std::span<const double> r, std::span<const cplx> u,
             std::span<cplx> out);

}  // namespace dipgp::simd
