#pragma once

// SMRE solver: min J(u) subject to T_N(sigma^-1 (Y - K u)) <= q for an additive
// MR family, written as the slab intersection
//   A = { u : |<Y - K u, phi_n*>| <= c_n for all n },  c_n = sigma (q + f_N(|phi_n|)).
//
// ADMM splits z = K u; the z-step is a Dykstra projection onto the slabs, the
// u-step is a regularised quadratic solve (sq_l2, sq_h1) or a TV proximal
// problem.

#include <cstddef>
#include <memory>
#include <vector>

#include "smre/dictionary.hpp"
#include "smre/mrstat.hpp"
#include "smre/operators.hpp"
#include "smre/penalties.hpp"

namespace smre {

struct ConstraintSet {
  std::shared_ptr<const Dictionary> dict;
  std::vector<double> bounds;    // c_n
  std::vector<double> centers;   // y_n = <Y, phi_n*>
  double sigma = 1.0;
  Signal data;
};

/// Builds the slabs for threshold q. Throws InvalidArgument when some
/// c_n < 0, i.e. q < -f_N(|phi_n|) leaves a slab empty.
ConstraintSet make_constraints(std::shared_ptr<const Dictionary> dict, const MrFamily& family,
                               double q, double sigma, const Signal& Y);

struct SolverConfig {
  double rho = 1.0;              // ADMM penalty, relative to the curvature scale of J
  std::size_t max_outer = 10000;
  double tol_primal = 1e-6;  // relative to max(|Y|, 1)
  double tol_dual = 1e-6;    // relative to max(|Y|, 1)
  std::size_t dykstra_max = 20000;
  double dykstra_tol = 1e-8;
  double inner_prox_tol = 1e-8;
  std::size_t inner_max = 500;
  double feasibility_tol = 1e-4;  // allowed excess of T_N over q, in statistic units
  bool adapt_rho = true;         // residual balancing over the first 200 iterations
};

struct ProjectionResult {
  Signal w;
  std::size_t sweeps = 0;
  double max_violation = 0.0;  // max_n (|<Y - w, phi_n*>| - c_n)_+
  bool converged = false;
};

/// Euclidean projection of w onto the slab intersection by Dykstra's cyclic
/// scheme. `dual` (one scalar per slab, the Dykstra correction along phi_n*)
/// may carry a warm start in and the final corrections out.
ProjectionResult project_admissible(const ConstraintSet& C, const Signal& w, const SolverConfig& cfg,
                                    std::vector<double>* dual = nullptr);

/// max_n (|<Y - v, phi_n*>| - c_n)_+ / sigma: the excess of T_N over q at Ku = v.
double constraint_violation(const ConstraintSet& C, const Signal& v);

struct IterationRecord {
  std::size_t iter = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;
};

struct SolverResult {
  Signal estimate;
  std::size_t iterations = 0;
  double max_constraint_violation = 0.0;  // statistic units
  double objective = 0.0;
  bool feasible = false;
  bool converged = false;
  std::vector<IterationRecord> history;
};

SolverResult solve_smre(const ForwardOperator& op, const Signal& Y, const ConstraintSet& C,
                        const Penalty& p, const SolverConfig& cfg = {});

/// argmin |Y - K u|^2 + lambda J(u) with the grid norm, i.e.
/// (1/n) sum (Y - Ku)^2 + lambda J(u) on n cells.
Signal solve_penalized_ls(const ForwardOperator& op, const Signal& Y, const Penalty& p, double lambda,
                          const SolverConfig& cfg = {});

/// Closed-form SMRE for a diagonal operator with the orthonormal basis as
/// dictionary and the penalized_logN family:
///   u = sum_n s_n^-1 y_n (1 - tau / |y_n|)_+ psi_n,   tau = sigma (q + sqrt(2 log N)),
/// with y_n = <Y, psi_n>. sigma defaults to the unit-noise form.
Signal solve_shrinkage(const ForwardOperator& op, const Signal& Y, std::size_t N, double q,
                       double sigma = 1.0);

}  // namespace smre
