#include <atomic>
#include <cstdlib>
#include <string>

#include "dipgp/error.hpp"
#include "dipgp/simd.hpp"

namespace dipgp::simd {

bool avx2_supported_by_cpu();

namespace {

Backend detect_backend() {
  if (const char* env = std::getenv("DIPGP_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::Scalar;
    if (choice == "avx2" && avx2_supported_by_cpu()) return Backend::Avx2;
  }
  return avx2_supported_by_cpu() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{detect_backend()};
  return slot;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::InvalidArgument, "simd kernel span sizes differ");
}

}  // namespace

bool backend_available(Backend b) {
  return b == Backend::Scalar || avx2_supported_by_cpu();
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw Error(ErrorCode::InvalidArgument, "SIMD backend not available on this CPU");
  }
  backend_slot().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels() {
  return active_backend() == Backend::Avx2 ? avx2_kernels() : scalar_kernels();
}

double sum_abs2(std::span<const cplx> u) { return kernels().sum_abs2(u.data(), u.size()); }

void abs2(std::span<const cplx> u, std::span<double> out) {
  check_sizes(u.size(), out.size());
  kernels().abs2(u.data(), out.data(), u.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return kernels().dot(a.data(), b.data(), a.size());
}

cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  check_sizes(a.size(), b.size());
  return kernels().cdot(a.data(), b.data(), a.size());
}

void scale(std::span<const double> r, std::span<const cplx> u, std::span<cplx> out) {
  check_sizes(r.size(), u.size());
  check_sizes(u.size(), out.size());
  kernels().scale(r.data(), u.data(), out.data(), u.size());
}

void scale_imag(std::span<const double> r, std::span<const cplx> u, std::span<cplx> out) {
  check_sizes(r.size(), u.size());
  check_sizes(u.size(), out.size());
  kernels().scale_imag(r.data(), u.data(), out.data(), u.size());
}

void axpby(double alpha, std::span<const cplx> x, double beta, std::span<const cplx> y,
           std::span<cplx> out) {
  check_sizes(x.size(), y.size());
  check_sizes(x.size(), out.size());
  kernels().axpby(alpha, x.data(), beta, y.data(), out.data(), x.size());
}

void mul_add(std::span<const cplx> base, std::span<const double> r, std::span<const cplx> u,
             std::span<cplx> out) {
  check_sizes(base.size(), r.size());
  check_sizes(r.size(), u.size());
  check_sizes(u.size(), out.size());
  kernels().mul_add(base.data(), r.data(), u.data(), out.data(), u.size());
}

}  // namespace dipgp::simd
