// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "smre/kernels.hpp"

namespace smre::kernels {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  __m256d s = _mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, s);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void window_diff_avx2(const double* prefix, std::size_t len, double scale, double* out,
                      std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prefix + i + len), _mm256_loadu_pd(prefix + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, d));
  }
  for (; i < n; ++i) out[i] = scale * (prefix[i + len] - prefix[i]);
}

MaxLoc max_abs_minus_avx2(const double* c, const double* offset, std::size_t n) {
  std::size_t i = 0;
  double best = std::abs(c[0]) - offset[0];
  if (n >= 4) {
    __m256d vmax = _mm256_sub_pd(abs_pd(_mm256_loadu_pd(c)), _mm256_loadu_pd(offset));
    for (i = 4; i + 4 <= n; i += 4) {
      vmax = _mm256_max_pd(vmax, _mm256_sub_pd(abs_pd(_mm256_loadu_pd(c + i)),
                                               _mm256_loadu_pd(offset + i)));
    }
    best = hmax(vmax);
  } else {
    i = 1;
  }
  for (; i < n; ++i) best = std::max(best, std::abs(c[i]) - offset[i]);
  // Second pass recovers the first index attaining the (exact) maximum.
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(c[j]) - offset[j] == best) return {best, j};
  }
  return {best, 0};
}

MaxLoc max_abs_avx2(const double* c, std::size_t n) {
  std::size_t i = 0;
  double best = std::abs(c[0]);
  if (n >= 4) {
    __m256d vmax = abs_pd(_mm256_loadu_pd(c));
    for (i = 4; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, abs_pd(_mm256_loadu_pd(c + i)));
    best = hmax(vmax);
  } else {
    i = 1;
  }
  for (; i < n; ++i) best = std::max(best, std::abs(c[i]));
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(c[j]) == best) return {best, j};
  }
  return {best, 0};
}

void soft_threshold_avx2(const double* y, double tau, double* out, std::size_t n) {
  const __m256d vt = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(y + i);
    const __m256d mag = _mm256_sub_pd(abs_pd(v), vt);
    const __m256d keep = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(v, sign_mask));
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, signed_mag));
  }
  for (; i < n; ++i) {
    const double m = std::abs(y[i]) - tau;
    out[i] = m > 0.0 ? std::copysign(m, y[i]) : 0.0;
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{
      "avx2",           dot_avx2,     axpy_avx2,           window_diff_avx2,
      max_abs_minus_avx2, max_abs_avx2, soft_threshold_avx2,
  };
  return table;
}

}  // namespace smre::kernels
