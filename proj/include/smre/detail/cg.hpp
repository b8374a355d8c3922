#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "smre/kernels.hpp"

namespace smre {

template <class MatVec>
std::size_t conjugate_gradient(MatVec&& A, std::span<const double> b, std::span<double> x,
                               double rel_tol, std::size_t max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), p(n), Ap(n);
  A(std::span<const double>(x), std::span<double>(Ap));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  const double bnorm = std::sqrt(kernels::dot(b, b));
  const double stop = rel_tol * (bnorm > 0.0 ? bnorm : 1.0);
  double rr = kernels::dot(r, r);
  if (std::sqrt(rr) <= stop) return 0;
  p = r;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    A(std::span<const double>(p), std::span<double>(Ap));
    const double pAp = kernels::dot(p, Ap);
    if (!(pAp > 0.0)) return it;
    const double a = rr / pAp;
    kernels::axpy(a, p, x);
    kernels::axpy(-a, Ap, r);
    const double rr_new = kernels::dot(r, r);
    if (std::sqrt(rr_new) <= stop) return it;
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  return max_iter + 1;
}

}  // namespace smre
