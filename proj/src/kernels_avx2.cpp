// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma; only reached after a
// runtime cpuid check, so the rest of the library can stay at baseline flags.

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

#include "kernels_table.hpp"

namespace declip::kernels {

namespace detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void hard_clip_avx2(const double* x, std::size_t n, double tau, double* out) {
  const __m256d vt = _mm256_set1_pd(tau);
  const __m256d vnt = _mm256_set1_pd(-tau);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_min_pd(_mm256_max_pd(v, vnt), vt);
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = std::min(std::max(x[i], -tau), tau);
}

void multiply_avx2(const double* a, const double* b, std::size_t n,
                   double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sqnorm_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

inline __m256d clamp_res(__m256d u, __m256d lo, __m256d hi) {
  return _mm256_sub_pd(u, _mm256_min_pd(_mm256_max_pd(u, lo), hi));
}

void clamp_residual_avx2(const double* u, const double* lo, const double* hi,
                         std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = clamp_res(_mm256_loadu_pd(u + i), _mm256_loadu_pd(lo + i),
                          _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i)
    out[i] = u[i] - std::min(std::max(u[i], lo[i]), hi[i]);
}

double clamp_residual_sqnorm_avx2(const double* u, const double* lo,
                                  const double* hi, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = clamp_res(_mm256_loadu_pd(u + i), _mm256_loadu_pd(lo + i),
                          _mm256_loadu_pd(hi + i));
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = u[i] - std::min(std::max(u[i], lo[i]), hi[i]);
    s += r * r;
  }
  return s;
}

double clamp_residual_sqnorm_step_avx2(const double* u, const double* step,
                                       double mu, const double* lo,
                                       const double* hi, std::size_t n) {
  const __m256d vmu = _mm256_set1_pd(mu);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fnmadd_pd(vmu, _mm256_loadu_pd(step + i),
                                 _mm256_loadu_pd(u + i));
    __m256d r = clamp_res(v, _mm256_loadu_pd(lo + i), _mm256_loadu_pd(hi + i));
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double v = u[i] - mu * step[i];
    const double r = v - std::min(std::max(v, lo[i]), hi[i]);
    s += r * r;
  }
  return s;
}

const Table kAvx2Table = {
    hard_clip_avx2,
    multiply_avx2,
    axpy_avx2,
    dot_avx2,
    sqnorm_avx2,
    clamp_residual_avx2,
    clamp_residual_sqnorm_avx2,
    clamp_residual_sqnorm_step_avx2,
    "avx2",
};

}  // namespace

const Table& avx2_table() { return kAvx2Table; }

bool runtime_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace detail
}  // namespace declip::kernels
