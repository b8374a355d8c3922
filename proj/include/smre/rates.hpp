#pragma once

// Parameter-choice schedules (sigma_k -> N_k or m_k, eta_k, alpha_k, zeta_k),
// source-element approximation errors, the modulus of continuity and the
// level-weighted piecewise-constant approximation on dyadic partitions.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "smre/grid.hpp"

namespace smre {

struct EllipsoidMeta {
  double beta = 1.0;
  double Q = 1.0;
};

/// Source element p given by its coefficients theta_n = <p, phi_n>, n = 1, 2, ...,
/// against an orthonormal dictionary; coefficients past the end are zero.
struct SourceElement {
  std::vector<double> coeffs;
  std::optional<EllipsoidMeta> ellipsoid;

  /// sum_n n^(2 beta) theta_n^2 over the stored coefficients.
  double ellipsoid_norm_sq(double beta) const;
};

/// theta_n = c n^(-beta - 1) for n <= count, with c chosen so that
/// sum n^(2 beta) theta_n^2 = fill Q^2 (fill in (0, 1]).
SourceElement ellipsoid_source(double beta, double Q, std::size_t count, double fill = 0.9);

/// err_N(p) = sqrt(sum_{n > N} theta_n^2).
double err_N(const SourceElement& p, std::size_t N);

/// Advisory absolute-summability test: true for ellipsoid meta with beta > 1/2,
/// for finitely supported coefficients, or when the partial sums of
/// err_N / sqrt(N) grow by at most `tol` (relative) over N in (N_max/2, N_max].
bool bernstein_stechkin_check(const SourceElement& p, std::size_t N_max, double tol = 0.05);

struct ScheduleEntry {
  std::size_t k = 0;  // position in the sigma sequence
  double sigma = 0.0;
  std::size_t N = 0;  // dictionary size used at step k
  int m = -1;         // dyadic: finest level used
  double eta = 0.0;
  double alpha = 0.0;
  double zeta = 0.0;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;
  double alpha_sum = 0.0;
  bool alpha_summable = true;  // heuristic: the second half of the partial sum is small
  bool degenerate = false;     // dyadic: some omega(delta_l) vanished
};

/// N_k = inf{N >= 2 : err_N <= sigma_k sqrt(2 log N)}, eta_k = sigma_k sqrt(2 log N_k),
/// alpha_k = exp(-(kappa eta_k / sigma_k)^2) = N_k^(-2 kappa^2),
/// zeta_k = sigma_k max(sqrt(2 log N_k), sqrt(-log alpha_k)).
/// sigmas must be strictly decreasing. Throws when N would exceed N_cap.
Schedule schedule_orthonormal(const SourceElement& p, const std::vector<double>& sigmas, double kappa,
                              std::size_t N_cap = 1000000);

/// max |g(s) - g(t)| over cell centres s, t with |s - t| <= delta. Exact.
double modulus_of_continuity(const Signal& g, double delta);

struct PwConstApprox {
  int max_level = 0;
  std::vector<double> omegas;   // omega(delta_l, g)
  std::vector<double> weights;  // a_lm
  std::vector<std::vector<double>> coeffs;  // b_{j,l} = a_lm * (cube average of g), per level
  Signal approximation;
  double error_sq = 0.0;        // |g - sum b chi|^2 in the grid norm
  double bound = 0.0;           // (m + 1) / sum_l omega^-2(delta_l, g)
  double weighted_mass = 0.0;   // sum_{l,j} |A_j| |b_{j,l}|
  double coeff_abs_sum = 0.0;   // sum_{l,j} |b_{j,l}|
  bool degenerate = false;      // some omega vanished; weights concentrate on those levels
};

/// Level-weighted dyadic cube averages on levels 0..m with weights
/// a_lm = omega^-2(delta_l) / sum_nu omega^-2(delta_nu).
PwConstApprox pw_const_approx(const Signal& g, int max_level);

/// m_k = inf{m : (m + 1) / sum_{nu <= m} omega^-2(delta_nu, p) <= -2 sigma_k^2 log eps_m},
/// eta_k = sigma_k sqrt(-2 log eps_{m_k}), N = n_{m_k + 1},
/// alpha_k = exp(-(kappa eta_k / sigma_k)^2) = eps_{m_k}^(2 kappa^2),
/// zeta_k = sigma_k max(sqrt(-2 gamma log eps_{m_k}), sqrt(-log alpha_k)).
/// gamma <= 0 selects gamma = d.
Schedule schedule_dyadic(const Signal& p, const std::vector<double>& sigmas, double kappa,
                         int m_cap = 20, double gamma = 0.0);

/// Dyadic constants for dimension d.
double dyadic_eps(int l, std::size_t d);
double dyadic_delta(int l, std::size_t d);
std::size_t dyadic_count(int l, std::size_t d);  // n_l = (2^(d l) - 1) / (2^d - 1)

/// CSV with header `k,sigma,N,eta,alpha,zeta`.
void write_schedule_csv(const std::filesystem::path& path, const Schedule& s);

}  // namespace smre
