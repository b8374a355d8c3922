#pragma once

// Dense reference computations for the tests. Everything here is written
// from the definitions with Eigen and no shortcuts, so it shares no code
// paths with the library beyond Signal storage.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "smre/dictionary.hpp"
#include "smre/grid.hpp"
#include "smre/operators.hpp"

namespace oracle {

inline Eigen::VectorXd vec(const smre::Signal& s) {
  return Eigen::Map<const Eigen::VectorXd>(s.data().data(), static_cast<Eigen::Index>(s.size()));
}

inline smre::Signal signal(const smre::Grid& g, const Eigen::VectorXd& v) {
  return smre::Signal(g, std::vector<double>(v.data(), v.data() + v.size()));
}

/// Matrix of a linear map on grid signals, built column by column.
template <class F>
Eigen::MatrixXd matrix_of(const smre::Grid& g, F&& f) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    smre::Signal e(g);
    e[static_cast<std::size_t>(j)] = 1.0;
    M.col(j) = vec(f(e));
  }
  return M;
}

/// Unit dual of an atom as a dense vector, from the atom's geometry.
inline Eigen::VectorXd dual_dense(const smre::Dictionary& d, std::size_t n) {
  const smre::Grid& g = d.grid();
  const double h = g.cell_measure();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  const auto& a = d.atom(n);
  if (const auto* box = std::get_if<smre::Box>(&a.shape)) {
    const std::size_t n1 = g.dim() == 2 ? g.extent(1) : 1;
    const double c = 1.0 / std::sqrt(static_cast<double>(box->cell_count()) * h);
    for (std::size_t i = box->lo[0]; i < box->hi[0]; ++i)
      for (std::size_t j = box->lo[1]; j < box->hi[1]; ++j) v[static_cast<Eigen::Index>(i * n1 + j)] = c;
  } else if (const auto* cells = std::get_if<smre::CellSet>(&a.shape)) {
    const double c = 1.0 / std::sqrt(static_cast<double>(cells->size()) * h);
    for (auto i : *cells) v[static_cast<Eigen::Index>(i)] = c;
  } else {
    const auto& dense = std::get<smre::DenseDual>(a.shape);
    for (std::size_t i = 0; i < dense.size(); ++i) v[static_cast<Eigen::Index>(i)] = dense[i];
  }
  return v;
}

/// Brute-force T_N: every coefficient as h * sum v_i phi*_i.
inline double brute_T(const smre::Dictionary& d, const std::vector<double>& offsets, const smre::Signal& v,
                      std::size_t* argmax = nullptr) {
  const double h = d.grid().cell_measure();
  const Eigen::VectorXd x = vec(v);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < d.size(); ++n) {
    const double t = std::abs(h * x.dot(dual_dense(d, n))) - offsets[n];
    if (t > best) {
      best = t;
      if (argmax) *argmax = n;
    }
  }
  return best;
}

/// Euclidean (grid-norm) projection of w onto { x : lo_j <= <x, a_j> <= hi_j }
/// by enumerating all 3^k active-set patterns. Each pattern fixes the active
/// constraints as equalities; the projection is the closest candidate that
/// is feasible.
inline std::optional<Eigen::VectorXd> slab_projection(const Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& a,
                                                      const std::vector<double>& lo, const std::vector<double>& hi,
                                                      double h, double feas_tol = 1e-9) {
  const std::size_t k = a.size();
  std::size_t patterns = 1;
  for (std::size_t j = 0; j < k; ++j) patterns *= 3;
  std::optional<Eigen::VectorXd> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < patterns; ++code) {
    std::vector<std::size_t> act;
    std::vector<double> target;
    std::size_t c = code;
    for (std::size_t j = 0; j < k; ++j, c /= 3) {
      if (c % 3 == 1) {
        act.push_back(j);
        target.push_back(lo[j]);
      } else if (c % 3 == 2) {
        act.push_back(j);
        target.push_back(hi[j]);
      }
    }
    Eigen::VectorXd x = w;
    if (!act.empty()) {
      const auto m = static_cast<Eigen::Index>(act.size());
      Eigen::MatrixXd G(m, m);
      Eigen::VectorXd r(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        r[i] = target[static_cast<std::size_t>(i)] - h * w.dot(a[act[static_cast<std::size_t>(i)]]);
        for (Eigen::Index j = 0; j < m; ++j)
          G(i, j) = h * a[act[static_cast<std::size_t>(i)]].dot(a[act[static_cast<std::size_t>(j)]]);
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
      if (lu.rank() < m) continue;
      const Eigen::VectorXd mu = lu.solve(r);
      for (Eigen::Index i = 0; i < m; ++i) x += mu[i] * a[act[static_cast<std::size_t>(i)]];
    }
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) {
      const double t = h * x.dot(a[j]);
      ok = t >= lo[j] - feas_tol && t <= hi[j] + feas_tol;
    }
    if (!ok) continue;
    const double dist = h * (x - w).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

}  // namespace oracle
