#pragma once

// Forward operators K: apply, adjoint (with respect to the grid inner
// product) and the ADMM quadratic solve (I + rho K*K) u = b.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "smre/dictionary.hpp"
#include "smre/grid.hpp"

namespace smre {

enum class OperatorKind { identity, diagonal_svd, convolution };
enum class Boundary { periodic, zero_padded };

std::string to_string(OperatorKind kind);

/// Convolution kernels sampled on `grid`. The kernel cell at index floor(n/2)
/// on each axis is offset zero; weights are normalised to sum to one.
/// `width` is the Gaussian standard deviation or the full box width, in
/// unit-cube coordinates.
Signal make_kernel(const Grid& grid, const std::string& shape, double width);

class ForwardOperator {
 public:
  static ForwardOperator identity(const Grid& grid);
  /// K psi_n = s_n psi_n in the orthonormal system `basis` (input and output
  /// bases coincide). Components orthogonal to the basis are annihilated.
  static ForwardOperator diagonal_svd(std::shared_ptr<const Dictionary> basis,
                                      std::vector<double> singular_values);
  /// Convenience: trigonometric basis on a 1-D grid, one value per cell.
  static ForwardOperator diagonal_svd(const Grid& grid, std::vector<double> singular_values);
  static ForwardOperator convolution(const Signal& kernel, Boundary boundary = Boundary::periodic);

  OperatorKind kind() const;
  const Grid& grid() const;
  Boundary boundary() const;

  Signal apply(const Signal& u) const;
  Signal adjoint(const Signal& v) const;
  /// Solves u + rho K*(K u) = b to relative residual <= 1e-10.
  Signal solve_regularized_normal(double rho, const Signal& b) const;
  /// Upper bound on |K| (exact for identity, diagonal and periodic convolution).
  double norm_bound() const;

  /// Coefficients <u, psi_n> in the diagonal basis.
  std::vector<double> analysis(const Signal& u) const;
  /// sum_n c_n psi_n.
  Signal synthesis(const std::vector<double>& c) const;
  const std::vector<double>& singular_values() const;
  const Dictionary& basis() const;

  struct Impl;

 private:
  explicit ForwardOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Conjugate gradients for a symmetric positive (semi)definite map under the
/// plain Euclidean product. Returns iterations used; x holds the warm start on
/// entry. Stops at |r| <= rel_tol |b|.
template <class MatVec>
std::size_t conjugate_gradient(MatVec&& A, std::span<const double> b, std::span<double> x,
                               double rel_tol, std::size_t max_iter);

}  // namespace smre

#include "smre/detail/cg.hpp"
