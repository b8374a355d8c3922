#include "smre/rates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "smre/detail/format.hpp"
#include "smre/error.hpp"

namespace smre {

double SourceElement::ellipsoid_norm_sq(double beta) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    s += std::pow(static_cast<double>(i + 1), 2.0 * beta) * coeffs[i] * coeffs[i];
  return s;
}

SourceElement ellipsoid_source(double beta, double Q, std::size_t count, double fill) {
  require(beta > 0.0 && Q > 0.0 && count > 0, "ellipsoid_source: invalid parameters");
  require(fill > 0.0 && fill <= 1.0, "ellipsoid_source: fill must lie in (0, 1]");
  SourceElement p;
  p.coeffs.resize(count);
  double z = 0.0;
  for (std::size_t n = 1; n <= count; ++n) z += 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  const double c = Q * std::sqrt(fill / z);
  for (std::size_t n = 1; n <= count; ++n) p.coeffs[n - 1] = c * std::pow(static_cast<double>(n), -beta - 1.0);
  p.ellipsoid = EllipsoidMeta{beta, Q};
  return p;
}

double err_N(const SourceElement& p, std::size_t N) {
  double s = 0.0;
  for (std::size_t i = p.coeffs.size(); i-- > N;) s += p.coeffs[i] * p.coeffs[i];
  return std::sqrt(s);
}

namespace {

// tail[N] = err_N^2 for N = 0..L.
std::vector<double> tail_squares(const SourceElement& p) {
  const std::size_t L = p.coeffs.size();
  std::vector<double> tail(L + 1, 0.0);
  for (std::size_t i = L; i-- > 0;) tail[i] = tail[i + 1] + p.coeffs[i] * p.coeffs[i];
  return tail;
}

void finish_schedule(Schedule& s) {
  s.alpha_sum = 0.0;
  for (const auto& e : s.entries) s.alpha_sum += e.alpha;
  const std::size_t K = s.entries.size();
  if (K < 4) {
    s.alpha_summable = true;
    return;
  }
  double second = 0.0;
  for (std::size_t i = K / 2; i < K; ++i) second += s.entries[i].alpha;
  s.alpha_summable = second <= 0.25 * s.alpha_sum;
}

void require_decreasing(const std::vector<double>& sigmas) {
  require(!sigmas.empty(), "schedule: need at least one sigma");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    require(sigmas[i] > 0.0, "schedule: sigmas must be positive");
    if (i > 0) require(sigmas[i] < sigmas[i - 1], "schedule: sigmas must be strictly decreasing");
  }
}

}  // namespace

bool bernstein_stechkin_check(const SourceElement& p, std::size_t N_max, double tol) {
  if (p.ellipsoid && p.ellipsoid->beta > 0.5) return true;
  require(N_max >= 4, "bernstein_stechkin_check: N_max must be at least 4");
  const auto tail = tail_squares(p);
  auto err = [&](std::size_t N) { return N < tail.size() ? std::sqrt(tail[N]) : 0.0; };
  if (err(N_max) == 0.0) return true;
  double total = 0.0, half = 0.0;
  for (std::size_t N = 1; N <= N_max; ++N) {
    total += err(N) / std::sqrt(static_cast<double>(N));
    if (N == N_max / 2) half = total;
  }
  return total - half <= tol * total;
}

Schedule schedule_orthonormal(const SourceElement& p, const std::vector<double>& sigmas, double kappa,
                              std::size_t N_cap) {
  require_decreasing(sigmas);
  require(kappa > 0.0, "schedule_orthonormal: kappa must be positive");
  const auto tail = tail_squares(p);
  auto err = [&](std::size_t N) { return N < tail.size() ? std::sqrt(tail[N]) : 0.0; };
  Schedule s;
  std::size_t N = 2;
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const double sigma = sigmas[k];
    while (err(N) > sigma * std::sqrt(2.0 * std::log(static_cast<double>(N)))) {
      if (++N > N_cap)
        throw ConvergenceError("schedule_orthonormal: N_k exceeds the cap " + std::to_string(N_cap) +
                               " at sigma " + std::to_string(sigma));
    }
    ScheduleEntry e;
    e.k = k;
    e.sigma = sigma;
    e.N = N;
    const double root = std::sqrt(2.0 * std::log(static_cast<double>(N)));
    e.eta = sigma * root;
    e.alpha = std::exp(-std::pow(kappa * e.eta / sigma, 2));
    e.zeta = sigma * std::max(root, std::sqrt(-std::log(e.alpha)));
    s.entries.push_back(e);
  }
  finish_schedule(s);
  return s;
}

double modulus_of_continuity(const Signal& g, double delta) {
  require(delta > 0.0, "modulus_of_continuity: delta must be positive");
  const Grid& grid = g.grid();
  const auto v = g.values();
  const std::size_t d = grid.dim();
  double diam2 = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const double n = static_cast<double>(grid.extent(a));
    diam2 += std::pow((n - 1.0) / n, 2);
  }
  if (delta * delta >= diam2) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  }
  if (d == 1) {
    // Pairs within distance delta are index pairs at most r apart: the answer is
    // the largest max-min spread over windows of r + 1 cells (monotone deques).
    const std::size_t n = grid.extent(0);
    const auto r = static_cast<std::size_t>(std::floor(delta * static_cast<double>(n) * (1.0 + 1e-12)));
    if (r == 0) return 0.0;
    std::deque<std::size_t> mx, mn;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      while (!mx.empty() && v[mx.back()] <= v[i]) mx.pop_back();
      while (!mn.empty() && v[mn.back()] >= v[i]) mn.pop_back();
      mx.push_back(i);
      mn.push_back(i);
      while (mx.front() + r < i) mx.pop_front();
      while (mn.front() + r < i) mn.pop_front();
      best = std::max(best, v[mx.front()] - v[mn.front()]);
    }
    return best;
  }
  const std::size_t n0 = grid.extent(0), n1 = grid.extent(1);
  const double w0 = 1.0 / static_cast<double>(n0), w1 = 1.0 / static_cast<double>(n1);
  const double lim = delta * delta * (1.0 + 1e-12);
  const auto r0 = static_cast<std::ptrdiff_t>(std::floor(delta * static_cast<double>(n0) * (1.0 + 1e-12)));
  const auto r1 = static_cast<std::ptrdiff_t>(std::floor(delta * static_cast<double>(n1) * (1.0 + 1e-12)));
  double best = 0.0;
  // Half-plane of offsets; |g(s) - g(t)| is symmetric in the pair.
  for (std::ptrdiff_t di = 0; di <= r0; ++di) {
    for (std::ptrdiff_t dj = -r1; dj <= r1; ++dj) {
      if (di == 0 && dj <= 0) continue;
      const double dist2 = std::pow(static_cast<double>(di) * w0, 2) + std::pow(static_cast<double>(dj) * w1, 2);
      if (dist2 > lim) continue;
      for (std::size_t i = 0; i + static_cast<std::size_t>(di) < n0; ++i) {
        const std::size_t i2 = i + static_cast<std::size_t>(di);
        const std::size_t j_lo = dj < 0 ? static_cast<std::size_t>(-dj) : 0;
        const std::size_t j_hi = dj > 0 ? n1 - static_cast<std::size_t>(dj) : n1;
        for (std::size_t j = j_lo; j < j_hi; ++j) {
          const std::size_t j2 = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + dj);
          best = std::max(best, std::abs(v[i * n1 + j] - v[i2 * n1 + j2]));
        }
      }
    }
  }
  return best;
}

double dyadic_eps(int l, std::size_t d) {
  return std::pow(2.0, -0.5 * static_cast<double>(l) * static_cast<double>(d));
}

double dyadic_delta(int l, std::size_t d) {
  return std::pow(2.0, -static_cast<double>(l)) * std::sqrt(static_cast<double>(d));
}

std::size_t dyadic_count(int l, std::size_t d) {
  const std::size_t base = std::size_t{1} << d;
  std::size_t total = 0, level = 1;
  for (int i = 0; i < l; ++i) {
    total += level;
    level *= base;
  }
  return total;
}

namespace {

// Weights a_lm from the level moduli. When some omega vanishes the weights
// spread uniformly over those levels (the limit of omega -> 0) and the bound is 0.
void level_weights(const std::vector<double>& omegas, std::vector<double>& weights, double& bound,
                   bool& degenerate) {
  const std::size_t L = omegas.size();
  weights.assign(L, 0.0);
  std::size_t zeros = 0;
  for (double w : omegas) zeros += (w == 0.0);
  if (zeros > 0) {
    degenerate = true;
    for (std::size_t l = 0; l < L; ++l) weights[l] = omegas[l] == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
    bound = 0.0;
    return;
  }
  degenerate = false;
  double s = 0.0;
  for (double w : omegas) s += 1.0 / (w * w);
  for (std::size_t l = 0; l < L; ++l) weights[l] = (1.0 / (omegas[l] * omegas[l])) / s;
  bound = static_cast<double>(L) / s;
}

}  // namespace

PwConstApprox pw_const_approx(const Signal& g, int max_level) {
  require(max_level >= 0 && max_level < 31, "pw_const_approx: invalid max_level");
  const Grid& grid = g.grid();
  const std::size_t d = grid.dim();
  const std::size_t side = std::size_t{1} << max_level;
  for (auto n : grid.dims()) require(n % side == 0, "pw_const_approx: grid dims must be divisible by 2^m");
  const std::size_t n0 = grid.extent(0), n1 = d == 2 ? grid.extent(1) : 1;
  const auto v = g.values();

  PwConstApprox out;
  out.max_level = max_level;
  for (int l = 0; l <= max_level; ++l) out.omegas.push_back(modulus_of_continuity(g, dyadic_delta(l, d)));
  level_weights(out.omegas, out.weights, out.bound, out.degenerate);

  out.approximation = Signal(grid);
  auto approx = out.approximation.values();
  for (int l = 0; l <= max_level; ++l) {
    const std::size_t parts = std::size_t{1} << l;
    const std::size_t b0 = n0 / parts;
    const std::size_t p1 = d == 2 ? parts : 1;
    const std::size_t b1 = n1 / p1;
    const double measure = dyadic_eps(l, d) * dyadic_eps(l, d);
    const double a = out.weights[static_cast<std::size_t>(l)];
    std::vector<double> level(parts * p1);
    for (std::size_t r = 0; r < parts; ++r) {
      for (std::size_t c = 0; c < p1; ++c) {
        double s = 0.0;
        for (std::size_t i = r * b0; i < (r + 1) * b0; ++i)
          for (std::size_t j = c * b1; j < (c + 1) * b1; ++j) s += v[i * n1 + j];
        const double b = a * s / static_cast<double>(b0 * b1);
        level[r * p1 + c] = b;
        out.weighted_mass += measure * std::abs(b);
        out.coeff_abs_sum += std::abs(b);
        if (b != 0.0)
          for (std::size_t i = r * b0; i < (r + 1) * b0; ++i)
            for (std::size_t j = c * b1; j < (c + 1) * b1; ++j) approx[i * n1 + j] += b;
      }
    }
    out.coeffs.push_back(std::move(level));
  }
  double e = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) e += (approx[i] - v[i]) * (approx[i] - v[i]);
  out.error_sq = grid.cell_measure() * e;
  return out;
}

Schedule schedule_dyadic(const Signal& p, const std::vector<double>& sigmas, double kappa, int m_cap,
                         double gamma) {
  require_decreasing(sigmas);
  require(kappa > 0.0, "schedule_dyadic: kappa must be positive");
  require(m_cap >= 0 && m_cap <= 40, "schedule_dyadic: m_cap out of range");
  const std::size_t d = p.grid().dim();
  if (gamma <= 0.0) gamma = static_cast<double>(d);
  std::vector<double> inv_sq;  // omega^-2(delta_l), +inf when omega vanishes
  std::vector<double> partial;
  auto ensure = [&](int m) {
    while (static_cast<int>(inv_sq.size()) <= m) {
      const int l = static_cast<int>(inv_sq.size());
      const double w = modulus_of_continuity(p, dyadic_delta(l, d));
      inv_sq.push_back(w == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (w * w));
      partial.push_back((partial.empty() ? 0.0 : partial.back()) + inv_sq.back());
    }
  };
  Schedule s;
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const double sigma = sigmas[k];
    int m = 0;
    for (;; ++m) {
      if (m > m_cap)
        throw ConvergenceError("schedule_dyadic: m_k exceeds the cap " + std::to_string(m_cap) +
                               " at sigma " + std::to_string(sigma));
      ensure(m);
      const double lhs = static_cast<double>(m + 1) / partial[static_cast<std::size_t>(m)];
      const double rhs = -2.0 * sigma * sigma * std::log(dyadic_eps(m, d));
      if (lhs <= rhs) break;
    }
    for (int l = 0; l <= m; ++l)
      if (std::isinf(inv_sq[static_cast<std::size_t>(l)])) s.degenerate = true;
    ScheduleEntry e;
    e.k = k;
    e.sigma = sigma;
    e.m = m;
    e.N = dyadic_count(m + 1, d);
    const double le = -std::log(dyadic_eps(m, d));
    e.eta = sigma * std::sqrt(2.0 * le);
    e.alpha = std::exp(-std::pow(kappa * e.eta / sigma, 2));
    e.zeta = sigma * std::max(std::sqrt(2.0 * gamma * le), std::sqrt(-std::log(e.alpha)));
    s.entries.push_back(e);
  }
  finish_schedule(s);
  return s;
}

void write_schedule_csv(const std::filesystem::path& path, const Schedule& s) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_schedule_csv: cannot open " + path.string());
  out << "k,sigma,N,eta,alpha,zeta\n";
  using detail::format_double;
  for (const auto& e : s.entries) {
    out << e.k << ',' << format_double(e.sigma) << ',' << e.N << ',' << format_double(e.eta) << ','
        << format_double(e.alpha) << ',' << format_double(e.zeta) << '\n';
  }
}

}  // namespace smre
