#include "dipgp/simd.hpp"

#if defined(DIPGP_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace dipgp::simd {

#if defined(DIPGP_HAVE_AVX2)
namespace {

// Complex arrays are interleaved (re, im) doubles: one __m256d holds two values.
#define DIPGP_AVX2 __attribute__((target("avx2,fma")))

DIPGP_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// [r0, r1] -> [r0, r0, r1, r1]
DIPGP_AVX2 inline __m256d dup_pairs(const double* r) {
  __m256d x = _mm256_castpd128_pd256(_mm_loadu_pd(r));
  return _mm256_permute4x64_pd(x, 0b01010000);
}

DIPGP_AVX2 double sum_abs2_avx2(const cplx* u, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(u);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(p + 2 * i);
    __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += std::norm(u[i]);
  return s;
}

DIPGP_AVX2 void abs2_avx2(const cplx* u, double* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(u);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(p + 2 * i);
    __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
    __m256d s = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(s, 0b11011000));
  }
  for (; i < n; ++i) {
    const double re = u[i].real(), im = u[i].imag();
    out[i] = re * re + im * im;
  }
}

DIPGP_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

DIPGP_AVX2 cplx cdot_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_im);
  }
  alignas(32) double im[4];
  _mm256_store_pd(im, acc_im);
  double re_sum = hsum(acc_re);
  double im_sum = (im[0] - im[1]) + (im[2] - im[3]);
  for (; i < n; ++i) {
    re_sum += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im_sum += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re_sum, im_sum};
}

DIPGP_AVX2 void scale_avx2(const double* r, const cplx* u, cplx* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(u);
  double* q = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(q + 2 * i, _mm256_mul_pd(dup_pairs(r + i), _mm256_loadu_pd(p + 2 * i)));
  }
  for (; i < n; ++i) out[i] = cplx(r[i] * u[i].real(), r[i] * u[i].imag());
}

DIPGP_AVX2 void scale_imag_avx2(const double* r, const cplx* u, cplx* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(u);
  double* q = reinterpret_cast<double*>(out);
  const __m256d sign = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d swapped = _mm256_permute_pd(_mm256_loadu_pd(p + 2 * i), 0b0101);
    __m256d prod = _mm256_mul_pd(dup_pairs(r + i), swapped);
    _mm256_storeu_pd(q + 2 * i, _mm256_xor_pd(prod, sign));
  }
  for (; i < n; ++i) out[i] = cplx(-r[i] * u[i].imag(), r[i] * u[i].real());
}

DIPGP_AVX2 void axpby_avx2(double alpha, const cplx* x, double beta, const cplx* y, cplx* out,
                           std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  const double* py = reinterpret_cast<const double*>(y);
  double* q = reinterpret_cast<double*>(out);
  const __m256d va = _mm256_set1_pd(alpha), vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d s = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(px + 2 * i)),
                              _mm256_mul_pd(vb, _mm256_loadu_pd(py + 2 * i)));
    _mm256_storeu_pd(q + 2 * i, s);
  }
  for (; i < n; ++i) {
    out[i] = cplx(alpha * x[i].real() + beta * y[i].real(),
                  alpha * x[i].imag() + beta * y[i].imag());
  }
}

DIPGP_AVX2 void mul_add_avx2(const cplx* base, const double* r, const cplx* u, cplx* out,
                             std::size_t n) {
  const double* pb = reinterpret_cast<const double*>(base);
  const double* pu = reinterpret_cast<const double*>(u);
  double* q = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d prod = _mm256_mul_pd(dup_pairs(r + i), _mm256_loadu_pd(pu + 2 * i));
    _mm256_storeu_pd(q + 2 * i, _mm256_add_pd(_mm256_loadu_pd(pb + 2 * i), prod));
  }
  for (; i < n; ++i) {
    out[i] = cplx(base[i].real() + r[i] * u[i].real(), base[i].imag() + r[i] * u[i].imag());
  }
}

#undef DIPGP_AVX2

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{sum_abs2_avx2, abs2_avx2,  dot_avx2,
                                 cdot_avx2,     scale_avx2, scale_imag_avx2,
                                 axpby_avx2,    mul_add_avx2};
  return table;
}

bool avx2_supported_by_cpu() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

const KernelTable& avx2_kernels() { return scalar_kernels(); }
bool avx2_supported_by_cpu() { return false; }

#endif

}  // namespace dipgp::simd
