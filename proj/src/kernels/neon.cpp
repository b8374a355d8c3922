// AArch64 Advanced SIMD variants. NEON is architecturally mandatory on
// AArch64, so no runtime probe is needed beyond compiling this unit.
#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "smre/kernels.hpp"

namespace smre::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
    s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double total = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void window_diff_neon(const double* prefix, std::size_t len, double scale, double* out,
                      std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vs, vsubq_f64(vld1q_f64(prefix + i + len), vld1q_f64(prefix + i))));
  }
  for (; i < n; ++i) out[i] = scale * (prefix[i + len] - prefix[i]);
}

MaxLoc max_abs_minus_neon(const double* c, const double* offset, std::size_t n) {
  double best = std::abs(c[0]) - offset[0];
  std::size_t i = 1;
  if (n >= 2) {
    float64x2_t vmax = vsubq_f64(vabsq_f64(vld1q_f64(c)), vld1q_f64(offset));
    for (i = 2; i + 2 <= n; i += 2)
      vmax = vmaxq_f64(vmax, vsubq_f64(vabsq_f64(vld1q_f64(c + i)), vld1q_f64(offset + i)));
    best = vmaxvq_f64(vmax);
  }
  for (; i < n; ++i) best = std::max(best, std::abs(c[i]) - offset[i]);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(c[j]) - offset[j] == best) return {best, j};
  }
  return {best, 0};
}

MaxLoc max_abs_neon(const double* c, std::size_t n) {
  double best = std::abs(c[0]);
  std::size_t i = 1;
  if (n >= 2) {
    float64x2_t vmax = vabsq_f64(vld1q_f64(c));
    for (i = 2; i + 2 <= n; i += 2) vmax = vmaxq_f64(vmax, vabsq_f64(vld1q_f64(c + i)));
    best = vmaxvq_f64(vmax);
  }
  for (; i < n; ++i) best = std::max(best, std::abs(c[i]));
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(c[j]) == best) return {best, j};
  }
  return {best, 0};
}

void soft_threshold_neon(const double* y, double tau, double* out, std::size_t n) {
  const float64x2_t vt = vdupq_n_f64(tau);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(y + i);
    const float64x2_t mag = vsubq_f64(vabsq_f64(v), vt);
    const uint64x2_t keep = vcgtq_f64(mag, zero);
    // Copy the sign bit of v onto mag, then zero the lanes that were shrunk away.
    const float64x2_t signed_mag = vbslq_f64(vdupq_n_u64(0x8000000000000000ULL), v, mag);
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(keep, vreinterpretq_u64_f64(signed_mag))));
  }
  for (; i < n; ++i) {
    const double m = std::abs(y[i]) - tau;
    out[i] = m > 0.0 ? std::copysign(m, y[i]) : 0.0;
  }
}

}  // namespace

const KernelTable& neon_table_impl() {
  static const KernelTable table{
      "neon",           dot_neon,     axpy_neon,           window_diff_neon,
      max_abs_minus_neon, max_abs_neon, soft_threshold_neon,
  };
  return table;
}

}  // namespace smre::kernels
