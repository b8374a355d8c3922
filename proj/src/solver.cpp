#include "smre/solver.hpp"

#include <algorithm>
#include <cmath>

#include "smre/error.hpp"
#include "smre/kernels.hpp"

namespace smre {

ConstraintSet make_constraints(std::shared_ptr<const Dictionary> dict, const MrFamily& family,
                               double q, double sigma, const Signal& Y) {
  require(dict != nullptr, "make_constraints: dictionary required");
  require(sigma > 0.0, "make_constraints: sigma must be positive");
  require(Y.grid() == dict->grid(), "make_constraints: data grid mismatch");
  ConstraintSet C;
  C.sigma = sigma;
  C.data = Y;
  const std::size_t N = dict->size();
  C.bounds.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double c = sigma * (q + family_offset(family, N, dict->atom_norm(n)));
    require(c >= 0.0, "make_constraints: q = " + std::to_string(q) +
                          " leaves slab " + std::to_string(n) + " empty (q below -f_N)");
    C.bounds[n] = c;
  }
  Projector proj(*dict);
  proj.load(Y);
  C.centers = proj.all();
  C.dict = std::move(dict);
  return C;
}

namespace {

double violation_coeff_units(const ConstraintSet& C, Projector& proj, std::span<const double> v,
                             std::vector<double>& coeff) {
  proj.load(v);
  proj.all(coeff);
  double worst = 0.0;
  for (std::size_t n = 0; n < coeff.size(); ++n)
    worst = std::max(worst, std::abs(C.centers[n] - coeff[n]) - C.bounds[n]);
  return worst;
}

}  // namespace

double constraint_violation(const ConstraintSet& C, const Signal& v) {
  Projector proj(*C.dict);
  std::vector<double> coeff(C.dict->size());
  return violation_coeff_units(C, proj, v.values(), coeff) / C.sigma;
}

ProjectionResult project_admissible(const ConstraintSet& C, const Signal& w, const SolverConfig& cfg,
                                    std::vector<double>* dual) {
  const Dictionary& dict = *C.dict;
  require(w.grid() == dict.grid(), "project_admissible: grid mismatch");
  const std::size_t N = dict.size();
  ProjectionResult res{w, 0, 0.0, false};
  std::vector<double> local;
  std::vector<double>& beta = dual ? *dual : local;
  if (beta.size() != N) beta.assign(N, 0.0);
  auto x = res.w.values();
  // Dykstra keeps x + sum_n beta_n phi_n* equal to the input point.
  for (std::size_t n = 0; n < N; ++n)
    if (beta[n] != 0.0) dict.add_dual(n, -beta[n], x);

  Projector proj(dict);
  std::vector<double> coeff(N);
  for (std::size_t sweep = 1; sweep <= cfg.dykstra_max; ++sweep) {
    double max_change = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double a = dict.coeff_direct(n, x) + beta[n];
      const double cl = std::clamp(a, C.centers[n] - C.bounds[n], C.centers[n] + C.bounds[n]);
      const double beta_new = a - cl;
      const double delta = beta[n] - beta_new;
      if (delta != 0.0) {
        dict.add_dual(n, delta, x);
        max_change = std::max(max_change, std::abs(delta));
      }
      beta[n] = beta_new;
    }
    res.sweeps = sweep;
    res.max_violation = std::max(0.0, violation_coeff_units(C, proj, x, coeff));
    if (res.max_violation <= cfg.dykstra_tol && max_change <= cfg.dykstra_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

namespace {

double grid_norm(std::span<const double> v, double h) { return std::sqrt(h * kernels::dot(v, v)); }

// argmin J(u) + rho/2 |K u - b|^2, warm-started at u.
void u_step(const ForwardOperator& op, const Penalty& p, double rho, const Signal& b, Signal& u,
            std::vector<double>& tv_dual, const SolverConfig& cfg) {
  const bool ident = op.kind() == OperatorKind::identity;
  switch (p.kind) {
    case PenaltyKind::sq_l2:
      u = op.solve_regularized_normal(rho, rho * op.adjoint(b));
      return;
    case PenaltyKind::sq_h1: {
      if (ident) {
        u = prox_J(p, b, 1.0 / rho);
        return;
      }
      const Signal rhs = rho * op.adjoint(b);
      auto A = [&](std::span<const double> x, std::span<double> y) {
        apply_h1_operator(p, u.grid(), x, y);
        Signal xs(u.grid(), std::vector<double>(x.begin(), x.end()));
        const Signal kk = op.adjoint(op.apply(xs));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += rho * kk[i];
      };
      conjugate_gradient(A, rhs.values(), u.values(), 1e-12, 10 * u.size() + 100);
      return;
    }
    case PenaltyKind::tv: {
      Penalty inner_p = p;
      inner_p.tv_tol = cfg.inner_prox_tol;
      if (ident) {
        auto r = prox_tv(inner_p, b, 1.0 / rho, &tv_dual);
        tv_dual = std::move(r.dual);
        u = std::move(r.w);
        return;
      }
      // FISTA on TV(u) + rho/2 |K u - b|^2.
      const double L = rho * std::pow(op.norm_bound(), 2);
      const double t = 1.0 / L;
      Signal y = u, u_prev = u;
      double s = 1.0;
      const double h = u.grid().cell_measure();
      for (std::size_t it = 0; it < cfg.inner_max; ++it) {
        const Signal grad = rho * op.adjoint(op.apply(y) - b);
        auto r = prox_tv(inner_p, y - t * grad, t, &tv_dual);
        tv_dual = std::move(r.dual);
        const double snew = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s * s));
        const Signal step = r.w - u_prev;
        y = r.w + ((s - 1.0) / snew) * step;
        u_prev = std::move(r.w);
        s = snew;
        if (grid_norm(step.values(), h) <= cfg.inner_prox_tol * (1.0 + grid_norm(u_prev.values(), h))) break;
      }
      u = std::move(u_prev);
      return;
    }
    case PenaltyKind::negentropy:
      throw InvalidArgument("solve_smre: negentropy is not supported as a solver penalty");
  }
}

constexpr std::size_t kAdaptUntil = 200;

}  // namespace

SolverResult solve_smre(const ForwardOperator& op, const Signal& Y, const ConstraintSet& C,
                        const Penalty& p, const SolverConfig& cfg) {
  require(Y.grid() == op.grid(), "solve_smre: data grid mismatch");
  require(C.dict && C.dict->grid() == Y.grid(), "solve_smre: constraint grid mismatch");
  require(cfg.rho > 0.0 && cfg.max_outer > 0, "solve_smre: invalid solver configuration");
  const Grid& g = Y.grid();
  const double scale = std::max(norm(Y), 1.0);
  const double tol_p = cfg.tol_primal * scale;
  const double tol_d = cfg.tol_dual * scale;

  // rho is given relative to the curvature of the penalty: the H1 seminorm
  // without the paper scaling carries a factor n^2 per axis.
  double rho = cfg.rho;
  if (p.kind == PenaltyKind::sq_h1 && !p.paper_scaling) {
    double w = 0.0;
    for (std::size_t a = 0; a < g.dim(); ++a) w = std::max(w, std::pow(static_cast<double>(g.extent(a)), 2));
    rho *= w;
  }
  std::vector<double> beta;
  std::vector<double> tv_dual;
  Signal u(g);
  auto proj0 = project_admissible(C, Y, cfg, &beta);
  Signal z = std::move(proj0.w);
  Signal d(g);

  SolverResult res;
  Projector vproj(*C.dict);
  std::vector<double> coeff(C.dict->size());
  for (std::size_t k = 1; k <= cfg.max_outer; ++k) {
    u_step(op, p, rho, z - d, u, tv_dual, cfg);
    const Signal Ku = op.apply(u);
    Signal z_old = z;
    auto pr = project_admissible(C, Ku + d, cfg, &beta);
    z = std::move(pr.w);
    const Signal r = Ku - z;
    d += r;
    const double primal = norm(r);
    const double dual = rho * norm(op.adjoint(z - z_old));
    const double viol = std::max(0.0, violation_coeff_units(C, vproj, Ku.values(), coeff)) / C.sigma;
    IterationRecord rec{k, primal, dual, eval_J(p, u), viol};
    res.history.push_back(rec);
    res.iterations = k;
    if (primal <= tol_p && dual <= tol_d && viol <= cfg.feasibility_tol && pr.converged) {
      res.converged = true;
      break;
    }
    // Residual balancing during a burn-in; ADMM then runs with a fixed penalty.
    if (cfg.adapt_rho && k % 5 == 0 && k <= kAdaptUntil) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        d *= 0.5;
      } else if (dual > 10.0 * primal) {
        rho *= 0.5;
        d *= 2.0;
      }
    }
  }
  res.estimate = std::move(u);
  res.objective = eval_J(p, res.estimate);
  res.max_constraint_violation = res.history.empty() ? 0.0 : res.history.back().max_violation;
  res.feasible = res.max_constraint_violation <= cfg.feasibility_tol;
  return res;
}

Signal solve_penalized_ls(const ForwardOperator& op, const Signal& Y, const Penalty& p, double lambda,
                          const SolverConfig& cfg) {
  require(lambda > 0.0, "solve_penalized_ls: lambda must be positive");
  require(Y.grid() == op.grid(), "solve_penalized_ls: grid mismatch");
  const bool ident = op.kind() == OperatorKind::identity;
  const Grid& g = Y.grid();
  switch (p.kind) {
    case PenaltyKind::sq_l2:
      return op.solve_regularized_normal(2.0 / lambda, (2.0 / lambda) * op.adjoint(Y));
    case PenaltyKind::sq_h1: {
      if (ident) return prox_J(p, Y, 0.5 * lambda);
      const Signal rhs = op.adjoint(Y);
      Signal u = rhs;
      auto A = [&](std::span<const double> x, std::span<double> y) {
        apply_h1_operator(p, g, x, y);
        Signal xs(g, std::vector<double>(x.begin(), x.end()));
        const Signal kk = op.adjoint(op.apply(xs));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * lambda * y[i] + kk[i];
      };
      conjugate_gradient(A, rhs.values(), u.values(), 1e-13, 20 * u.size() + 100);
      return u;
    }
    case PenaltyKind::tv: {
      Penalty inner_p = p;
      inner_p.tv_tol = cfg.inner_prox_tol;
      if (ident) return prox_tv(inner_p, Y, 0.5 * lambda).w;
      const double t = 1.0 / (2.0 * std::pow(op.norm_bound(), 2));
      const double h = g.cell_measure();
      Signal u = Y, y = Y;
      std::vector<double> dual;
      double s = 1.0;
      for (std::size_t it = 0; it < cfg.max_outer; ++it) {
        const Signal grad = 2.0 * op.adjoint(op.apply(y) - Y);
        auto r = prox_tv(inner_p, y - t * grad, t * lambda, &dual);
        dual = std::move(r.dual);
        const double snew = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s * s));
        const Signal step = r.w - u;
        y = r.w + ((s - 1.0) / snew) * step;
        u = std::move(r.w);
        s = snew;
        if (grid_norm(step.values(), h) <= 1e-10 * (1.0 + grid_norm(u.values(), h))) break;
      }
      return u;
    }
    case PenaltyKind::negentropy:
      throw InvalidArgument("solve_penalized_ls: negentropy is not supported");
  }
  return Y;
}

Signal solve_shrinkage(const ForwardOperator& op, const Signal& Y, std::size_t N, double q, double sigma) {
  require(op.kind() == OperatorKind::diagonal_svd, "solve_shrinkage: diagonal_svd operator required");
  require(N >= 2, "solve_shrinkage: N must be at least 2");
  require(N <= op.basis().size(), "solve_shrinkage: N exceeds the basis size");
  require(sigma > 0.0, "solve_shrinkage: sigma must be positive");
  const double tau = sigma * (q + std::sqrt(2.0 * std::log(static_cast<double>(N))));
  auto y = op.analysis(Y);
  const auto& s = op.singular_values();
  for (std::size_t n = 0; n < y.size(); ++n) {
    if (n >= N) {
      y[n] = 0.0;
      continue;
    }
    const double a = std::abs(y[n]);
    y[n] = a > tau ? (y[n] / s[n]) * (1.0 - tau / a) : 0.0;
  }
  return op.synthesis(y);
}

}  // namespace smre
