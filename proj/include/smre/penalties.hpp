#pragma once

// Convex penalties J with evaluation, proximal maps, subgradients and Bregman
// divergences.
//
// Conventions (all sums over grid cells, h the cell measure):
//   sq_l2       J(u) = 1/2 |u|^2 = h/2 sum u_i^2
//   sq_h1       J(u) = h sum_axis w_axis sum (forward difference)^2, Neumann
//               boundary; w_axis = 1 with paper_scaling (so 1-D gives
//               (1/n) sum |u_{k+1} - u_k|^2), otherwise n_axis^2 (the H1 seminorm).
//   tv          J(u) = h sum_i |(G u)_i| with G the forward difference scaled by
//               n_axis on each axis; isotropic in 2-D. A 1-D step of height c
//               has TV |c| at every resolution, a 2-D indicator approaches its
//               perimeter.
//   negentropy  J(u) = h sum u_i log u_i on u >= 0; Bregman evaluation only.
//
// Subgradients and proximal maps are taken with respect to the grid inner
// product, so prox(v, tau) = argmin_w 1/2 |w - v|^2 + tau J(w).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smre/grid.hpp"

namespace smre {

enum class PenaltyKind { sq_l2, sq_h1, tv, negentropy };

std::string to_string(PenaltyKind kind);

struct Penalty {
  PenaltyKind kind = PenaltyKind::sq_l2;
  bool paper_scaling = false;  // sq_h1 only
  double tv_tol = 1e-8;        // relative duality-gap tolerance of the TV prox
  std::size_t tv_max_iter = 50000;

  static Penalty sq_l2() { return {PenaltyKind::sq_l2}; }
  static Penalty sq_h1(bool paper_scaling = false) { return {PenaltyKind::sq_h1, paper_scaling}; }
  static Penalty tv() { return {PenaltyKind::tv}; }
  static Penalty negentropy() { return {PenaltyKind::negentropy}; }
};

double eval_J(const Penalty& p, const Signal& u);

/// Throws ConvergenceError when the TV inner loop misses its tolerance.
Signal prox_J(const Penalty& p, const Signal& v, double tau);

struct TvProxResult {
  Signal w;
  std::vector<double> dual;  // p, d components per cell; reusable as a warm start
  std::size_t iterations = 0;
  double gap = 0.0;          // primal-dual gap in unweighted sum units
  bool converged = false;
};

/// Accelerated dual projected gradient for argmin 1/2 |w - v|^2 + tau TV(w).
TvProxResult prox_tv(const Penalty& p, const Signal& v, double tau,
                     const std::vector<double>* warm_dual = nullptr);

/// Gradient of a differentiable penalty (sq_l2, sq_h1, negentropy on u > 0).
Signal gradient_J(const Penalty& p, const Signal& u);

/// Applies the sq_h1 operator: y = 2 L x with L = D^T W D, so that grad J = 2 L u.
void apply_h1_operator(const Penalty& p, const Grid& grid, std::span<const double> x,
                       std::span<double> y);

/// The scaled forward-difference operator of the TV convention and its
/// adjoint. grad has dim() entries per cell, cell-major.
void tv_gradient(const Grid& grid, std::span<const double> u, std::span<double> grad);
void tv_divergence_adjoint(const Grid& grid, std::span<const double> field, std::span<double> out);

struct BregmanResult {
  double value = 0.0;
  Signal subgradient_used;
};

/// D_J^xi(v, u) = J(v) - J(u) - <xi, v - u>.
BregmanResult bregman(const Penalty& p, const Signal& v, const Signal& u, const Signal& xi);
/// Same with the canonical subgradient at u (gradient, or the TV witness).
BregmanResult bregman(const Penalty& p, const Signal& v, const Signal& u);

/// Smooth continuation of the unit normal field around a disc, used where the
/// gradient of u vanishes: z = -psi(r) (x - c) / r with psi(radius) = 1.
struct DiscExtension {
  double cx = 0.5;
  double cy = 0.5;
  double radius = 0.25;
  double width = 0.1;
};

/// xi = G^T z with z = G u / |G u| where G u != 0. Then <xi, u> = TV(u) and
/// xi is a subgradient of TV at u. Elsewhere z = 0, or the disc extension
/// when supplied (2-D only).
Signal tv_subgradient_witness(const Signal& u, const std::optional<DiscExtension>& ext = std::nullopt);

}  // namespace smre
