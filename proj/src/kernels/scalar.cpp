#include <cmath>

#include "smre/kernels.hpp"

namespace smre::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void window_diff_scalar(const double* prefix, std::size_t len, double scale, double* out,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * (prefix[i + len] - prefix[i]);
}

MaxLoc max_abs_minus_scalar(const double* c, const double* offset, std::size_t n) {
  MaxLoc best{std::abs(c[0]) - offset[0], 0};
  for (std::size_t i = 1; i < n; ++i) {
    const double v = std::abs(c[i]) - offset[i];
    if (v > best.value) best = {v, i};
  }
  return best;
}

MaxLoc max_abs_scalar(const double* c, std::size_t n) {
  MaxLoc best{std::abs(c[0]), 0};
  for (std::size_t i = 1; i < n; ++i) {
    const double v = std::abs(c[i]);
    if (v > best.value) best = {v, i};
  }
  return best;
}

void soft_threshold_scalar(const double* y, double tau, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::abs(y[i]) - tau;
    out[i] = m > 0.0 ? std::copysign(m, y[i]) : 0.0;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",          dot_scalar,     axpy_scalar,          window_diff_scalar,
      max_abs_minus_scalar, max_abs_scalar, soft_threshold_scalar,
  };
  return table;
}

}  // namespace smre::kernels
