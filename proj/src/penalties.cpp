#include "smre/penalties.hpp"

#include <algorithm>
#include <cmath>

#include "smre/error.hpp"
#include "smre/kernels.hpp"
#include "smre/operators.hpp"

namespace smre {

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::sq_l2: return "sq_l2";
    case PenaltyKind::sq_h1: return "sq_h1";
    case PenaltyKind::tv: return "tv";
    case PenaltyKind::negentropy: return "negentropy";
  }
  return "unknown";
}

namespace {

std::array<std::size_t, 2> extents(const Grid& g) {
  return {g.extent(0), g.dim() == 2 ? g.extent(1) : 1};
}

double h1_weight(const Penalty& p, const Grid& g, std::size_t axis) {
  if (p.paper_scaling) return 1.0;
  const auto n = static_cast<double>(g.extent(axis));
  return n * n;
}

double eval_h1(const Penalty& p, const Signal& u) {
  const Grid& g = u.grid();
  const auto n = extents(g);
  const auto v = u.values();
  double total = 0.0;
  for (std::size_t axis = 0; axis < g.dim(); ++axis) {
    const double w = h1_weight(p, g, axis);
    double s = 0.0;
    for (std::size_t i = 0; i < n[0]; ++i) {
      for (std::size_t j = 0; j < n[1]; ++j) {
        const std::size_t c = i * n[1] + j;
        if (axis == 0 && i + 1 < n[0]) s += std::pow(v[c + n[1]] - v[c], 2);
        if (axis == 1 && j + 1 < n[1]) s += std::pow(v[c + 1] - v[c], 2);
      }
    }
    total += w * s;
  }
  return g.cell_measure() * total;
}

double eval_tv(const Signal& u) {
  const Grid& g = u.grid();
  const std::size_t d = g.dim();
  std::vector<double> grad(u.size() * d);
  tv_gradient(g, u.values(), grad);
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    double m = 0.0;
    for (std::size_t a = 0; a < d; ++a) m += grad[c * d + a] * grad[c * d + a];
    s += std::sqrt(m);
  }
  return g.cell_measure() * s;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// (I + 2 tau L) w = v for the 1-D Neumann chain: Thomas algorithm.
Signal h1_prox_1d(double coupling, const Signal& v) {
  const std::size_t n = v.size();
  Signal w(v.grid());
  if (n == 1) {
    w[0] = v[0];
    return w;
  }
  std::vector<double> c(n), d(n);
  auto diag = [&](std::size_t i) { return 1.0 + coupling * ((i == 0 || i == n - 1) ? 1.0 : 2.0); };
  const double off = -coupling;
  double b0 = diag(0);
  c[0] = off / b0;
  d[0] = v[0] / b0;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag(i) - off * c[i - 1];
    c[i] = off / m;
    d[i] = (v[i] - off * d[i - 1]) / m;
  }
  w[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) w[i] = d[i] - c[i] * w[i + 1];
  return w;
}

// Direct 1-D TV denoising: argmin_x 1/2 sum (x - y)^2 + lambda sum |x_{k+1} - x_k|.
// Condat's taut-string style scan, exact in finitely many steps.
void tv1d_exact(std::span<const double> y, std::span<double> x, double lambda) {
  const std::ptrdiff_t width = static_cast<std::ptrdiff_t>(y.size());
  if (width == 0) return;
  std::ptrdiff_t k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lambda, umax = -lambda;
  double vmin = y[0] - lambda, vmax = y[0] + lambda;
  const double twolambda = 2.0 * lambda;
  const double minlambda = -lambda;
  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do x[k0++] = vmin; while (k0 <= kminus);
        k = kminus = k0;
        vmin = y[k];
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do x[k0++] = vmax; while (k0 <= kplus);
        k = kplus = k0;
        vmax = y[k];
        umax = minlambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do x[k0++] = vmin; while (k0 <= k);
        return;
      }
    }
    if ((umin += y[k + 1] - vmin) < minlambda) {
      do x[k0++] = vmin; while (k0 <= kminus);
      k = kplus = kminus = k0;
      vmin = y[k];
      vmax = vmin + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += y[k + 1] - vmax) > lambda) {
      do x[k0++] = vmax; while (k0 <= kplus);
      k = kplus = kminus = k0;
      vmax = y[k];
      vmin = vmax - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      ++k;
      if (umin >= lambda) {
        kminus = k;
        vmin += (umin - lambda) / static_cast<double>(kminus - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        kplus = k;
        vmax += (umax + lambda) / static_cast<double>(kplus - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

struct TvGap {
  double gap;
  double primal;
};

// Gap tau sum (|Gw| - <Gw, p>) and primal value for w = v - tau G^T p.
TvGap tv_gap(const Grid& g, std::span<const double> v, std::span<const double> w,
             std::span<const double> p, double tau, std::vector<double>& grad) {
  const std::size_t d = g.dim();
  tv_gradient(g, w, grad);
  double tv = 0.0, pair = 0.0, fit = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    double m = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      m += grad[c * d + a] * grad[c * d + a];
      pair += grad[c * d + a] * p[c * d + a];
    }
    tv += std::sqrt(m);
    fit += (w[c] - v[c]) * (w[c] - v[c]);
  }
  return {tau * (tv - pair), 0.5 * fit + tau * tv};
}

}  // namespace

void tv_gradient(const Grid& g, std::span<const double> u, std::span<double> grad) {
  const auto n = extents(g);
  const std::size_t d = g.dim();
  const double s0 = static_cast<double>(n[0]);
  const double s1 = static_cast<double>(n[1]);
  for (std::size_t i = 0; i < n[0]; ++i) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      const std::size_t c = i * n[1] + j;
      grad[c * d] = i + 1 < n[0] ? s0 * (u[c + n[1]] - u[c]) : 0.0;
      if (d == 2) grad[c * d + 1] = j + 1 < n[1] ? s1 * (u[c + 1] - u[c]) : 0.0;
    }
  }
}

void tv_divergence_adjoint(const Grid& g, std::span<const double> q, std::span<double> out) {
  const auto n = extents(g);
  const std::size_t d = g.dim();
  const double s0 = static_cast<double>(n[0]);
  const double s1 = static_cast<double>(n[1]);
  for (std::size_t i = 0; i < n[0]; ++i) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      const std::size_t c = i * n[1] + j;
      double acc = 0.0;
      if (i + 1 < n[0]) acc -= s0 * q[c * d];
      if (i > 0) acc += s0 * q[(c - n[1]) * d];
      if (d == 2) {
        if (j + 1 < n[1]) acc -= s1 * q[c * d + 1];
        if (j > 0) acc += s1 * q[(c - 1) * d + 1];
      }
      out[c] = acc;
    }
  }
}

void apply_h1_operator(const Penalty& p, const Grid& g, std::span<const double> x, std::span<double> y) {
  const auto n = extents(g);
  const double w0 = h1_weight(p, g, 0);
  const double w1 = g.dim() == 2 ? h1_weight(p, g, 1) : 0.0;
  for (std::size_t i = 0; i < n[0]; ++i) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      const std::size_t c = i * n[1] + j;
      double acc = 0.0;
      if (i + 1 < n[0]) acc += w0 * (x[c] - x[c + n[1]]);
      if (i > 0) acc += w0 * (x[c] - x[c - n[1]]);
      if (g.dim() == 2) {
        if (j + 1 < n[1]) acc += w1 * (x[c] - x[c + 1]);
        if (j > 0) acc += w1 * (x[c] - x[c - 1]);
      }
      y[c] = 2.0 * acc;
    }
  }
}

double eval_J(const Penalty& p, const Signal& u) {
  switch (p.kind) {
    case PenaltyKind::sq_l2: return 0.5 * inner(u, u);
    case PenaltyKind::sq_h1: return eval_h1(p, u);
    case PenaltyKind::tv: return eval_tv(u);
    case PenaltyKind::negentropy: {
      double s = 0.0;
      for (double x : u.values()) {
        require(x >= 0.0, "eval_J: negentropy needs non-negative input");
        s += xlogx(x);
      }
      return u.grid().cell_measure() * s;
    }
  }
  return 0.0;
}

TvProxResult prox_tv(const Penalty& p, const Signal& v, double tau, const std::vector<double>* warm) {
  require(tau > 0.0, "prox_tv: tau must be positive");
  const Grid& g = v.grid();
  const std::size_t n = v.size();
  const std::size_t d = g.dim();
  TvProxResult res{Signal(g), std::vector<double>(n * d, 0.0), 0, 0.0, false};
  std::vector<double> grad(n * d);
  std::vector<double> div(n);

  if (d == 1) {
    // Exact solution; the dual follows from tau G^T p = v - w by a running sum.
    const double lambda = tau * static_cast<double>(g.extent(0));
    tv1d_exact(v.values(), res.w.values(), lambda);
    double acc = 0.0;
    const double scale = 1.0 / (tau * static_cast<double>(g.extent(0)));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      acc -= (v[i] - res.w[i]) * scale;
      res.dual[i] = std::clamp(acc, -1.0, 1.0);
    }
    const auto gap = tv_gap(g, v.values(), res.w.values(), res.dual, tau, grad);
    res.gap = std::max(0.0, gap.gap);
    res.iterations = 1;
    res.converged = true;
    return res;
  }

  // Accelerated projected gradient on the dual (FGP).
  if (warm && warm->size() == n * d) res.dual = *warm;
  double lip = 0.0;
  for (std::size_t a = 0; a < d; ++a) lip += 4.0 * std::pow(static_cast<double>(g.extent(a)), 2);
  const double step = 1.0 / (tau * lip);
  std::vector<double> pk = res.dual, r = res.dual, pnew(n * d);
  auto primal_from = [&](std::span<const double> q, std::span<double> w) {
    tv_divergence_adjoint(g, q, div);
    for (std::size_t i = 0; i < n; ++i) w[i] = v[i] - tau * div[i];
  };
  double t = 1.0;
  for (std::size_t it = 1; it <= p.tv_max_iter; ++it) {
    primal_from(r, res.w.values());
    tv_gradient(g, res.w.values(), grad);
    for (std::size_t c = 0; c < n; ++c) {
      double m = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double z = r[c * d + a] + step * grad[c * d + a];
        pnew[c * d + a] = z;
        m += z * z;
      }
      if (m > 1.0) {
        const double inv = 1.0 / std::sqrt(m);
        for (std::size_t a = 0; a < d; ++a) pnew[c * d + a] *= inv;
      }
    }
    // Gradient-mapping restart: drop the momentum when it points uphill.
    double align = 0.0;
    for (std::size_t k = 0; k < n * d; ++k) align += (r[k] - pnew[k]) * (pnew[k] - pk[k]);
    if (align > 0.0) t = 1.0;
    const double tnew = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double mom = (t - 1.0) / tnew;
    for (std::size_t k = 0; k < n * d; ++k) r[k] = pnew[k] + mom * (pnew[k] - pk[k]);
    pk.swap(pnew);
    t = tnew;
    res.iterations = it;
    if (it % 10 == 0 || it == p.tv_max_iter) {
      primal_from(pk, res.w.values());
      const auto gap = tv_gap(g, v.values(), res.w.values(), pk, tau, grad);
      res.gap = gap.gap;
      if (gap.gap <= p.tv_tol * std::max(gap.primal, 1e-300)) {
        res.converged = true;
        break;
      }
    }
  }
  res.dual = std::move(pk);
  primal_from(res.dual, res.w.values());
  return res;
}

Signal prox_J(const Penalty& p, const Signal& v, double tau) {
  require(tau > 0.0, "prox_J: tau must be positive");
  switch (p.kind) {
    case PenaltyKind::sq_l2: return (1.0 / (1.0 + tau)) * v;
    case PenaltyKind::sq_h1: {
      const Grid& g = v.grid();
      if (g.dim() == 1) return h1_prox_1d(2.0 * tau * h1_weight(p, g, 0), v);
      Signal w = v;
      auto A = [&](std::span<const double> x, std::span<double> y) {
        apply_h1_operator(p, g, x, y);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + tau * y[i];
      };
      if (conjugate_gradient(A, v.values(), w.values(), 1e-13, 20 * v.size() + 100) > 20 * v.size() + 100)
        throw ConvergenceError("prox_J: sq_h1 conjugate gradients did not converge");
      return w;
    }
    case PenaltyKind::tv: {
      auto res = prox_tv(p, v, tau);
      if (!res.converged)
        throw ConvergenceError("prox_J: TV dual iteration reached " + std::to_string(res.iterations) +
                               " iterations with gap " + std::to_string(res.gap));
      return std::move(res.w);
    }
    case PenaltyKind::negentropy:
      throw InvalidArgument("prox_J: negentropy supports Bregman evaluation only");
  }
  return v;
}

Signal gradient_J(const Penalty& p, const Signal& u) {
  switch (p.kind) {
    case PenaltyKind::sq_l2: return u;
    case PenaltyKind::sq_h1: {
      Signal g(u.grid());
      apply_h1_operator(p, u.grid(), u.values(), g.values());
      return g;
    }
    case PenaltyKind::negentropy: {
      Signal g(u.grid());
      for (std::size_t i = 0; i < u.size(); ++i) {
        require(u[i] > 0.0, "gradient_J: negentropy gradient needs positive input");
        g[i] = std::log(u[i]) + 1.0;
      }
      return g;
    }
    case PenaltyKind::tv:
      throw InvalidArgument("gradient_J: TV is not differentiable; use tv_subgradient_witness");
  }
  return u;
}

BregmanResult bregman(const Penalty& p, const Signal& v, const Signal& u, const Signal& xi) {
  require_same_grid(v, u, "bregman");
  require_same_grid(v, xi, "bregman");
  BregmanResult out{0.0, xi};
  if (p.kind == PenaltyKind::negentropy) {
    // KL form, exact at v = 0 and free of the J(v) - J(u) cancellation.
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      require(v[i] >= 0.0 && u[i] > 0.0, "bregman: negentropy needs v >= 0 and u > 0");
      s += xlogx(v[i]) - v[i] * std::log(u[i]) - v[i] + u[i];
    }
    out.value = v.grid().cell_measure() * s;
    return out;
  }
  if (p.kind == PenaltyKind::sq_l2) {
    const Signal diff = v - u;
    out.value = 0.5 * inner(diff, diff) + inner(u - xi, diff);
    return out;
  }
  out.value = eval_J(p, v) - eval_J(p, u) - inner(xi, v - u);
  return out;
}

BregmanResult bregman(const Penalty& p, const Signal& v, const Signal& u) {
  if (p.kind == PenaltyKind::tv) return bregman(p, v, u, tv_subgradient_witness(u));
  if (p.kind == PenaltyKind::negentropy) {
    Signal xi(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
      require(u[i] > 0.0, "bregman: negentropy needs u > 0");
      xi[i] = std::log(u[i]) + 1.0;
    }
    return bregman(p, v, u, xi);
  }
  return bregman(p, v, u, gradient_J(p, u));
}

Signal tv_subgradient_witness(const Signal& u, const std::optional<DiscExtension>& ext) {
  const Grid& g = u.grid();
  const std::size_t d = g.dim();
  require(!ext || d == 2, "tv_subgradient_witness: disc extension needs a 2-D grid");
  std::vector<double> z(u.size() * d);
  tv_gradient(g, u.values(), z);
  for (std::size_t i = 0; i < g.extent(0); ++i) {
    for (std::size_t j = 0; j < (d == 2 ? g.extent(1) : 1); ++j) {
      const std::size_t c = d == 2 ? g.index(i, j) : i;
      double m = 0.0;
      for (std::size_t a = 0; a < d; ++a) m += z[c * d + a] * z[c * d + a];
      if (m > 0.0) {
        const double inv = 1.0 / std::sqrt(m);
        for (std::size_t a = 0; a < d; ++a) z[c * d + a] *= inv;
      } else if (ext) {
        const double x = g.center(0, i) - ext->cx;
        const double y = g.center(1, j) - ext->cy;
        const double r = std::hypot(x, y);
        if (r > 0.0) {
          const double psi = std::exp(-std::pow((r - ext->radius) / ext->width, 2));
          z[c * d] = -psi * x / r;
          z[c * d + 1] = -psi * y / r;
        }
      }
    }
  }
  Signal xi(g);
  tv_divergence_adjoint(g, z, xi.values());
  return xi;
}

}  // namespace smre
