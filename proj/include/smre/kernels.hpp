#pragma once

// Data-parallel inner loops behind the statistic, projection and solver code.
//
// Each kernel has a scalar reference implementation plus optional SIMD
// variants (AVX2 on x86-64, NEON on AArch64). The active table is chosen once
// at first use from the CPU feature bits; the environment variable
// SMRE_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace smre::kernels {

struct MaxLoc {
  double value;
  std::size_t index;
};

struct KernelTable {
  std::string_view name;
  /// sum_i a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y_i += alpha * x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out_i = scale * (prefix_{i+len} - prefix_i), i < n
  void (*window_diff)(const double* prefix, std::size_t len, double scale, double* out,
                      std::size_t n);
  /// max_i |c_i| - offset_i with lowest-index tie-break; n > 0
  MaxLoc (*max_abs_minus)(const double* c, const double* offset, std::size_t n);
  /// max_i |c_i| with lowest-index tie-break; n > 0
  MaxLoc (*max_abs)(const double* c, std::size_t n);
  /// out_i = sign(y_i) * max(|y_i| - tau, 0)
  void (*soft_threshold)(const double* y, double tau, double* out, std::size_t n);
};

const KernelTable& scalar_table();
/// Null when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Table selected for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void window_diff(std::span<const double> prefix, std::size_t len, double scale,
                        std::span<double> out) {
  active().window_diff(prefix.data(), len, scale, out.data(), out.size());
}
inline MaxLoc max_abs_minus(std::span<const double> c, std::span<const double> offset) {
  return active().max_abs_minus(c.data(), offset.data(), c.size());
}
inline MaxLoc max_abs(std::span<const double> c) { return active().max_abs(c.data(), c.size()); }
inline void soft_threshold(std::span<const double> y, double tau, std::span<double> out) {
  active().soft_threshold(y.data(), tau, out.data(), y.size());
}

}  // namespace smre::kernels
