#pragma once

// Experiment drivers behind the CLI: the denoising demo, Monte-Carlo
// coverage of the admissible region and the consistency/rate sweep.
//
// Noise convention: `noise.sigma` is the per-cell regression noise level, so
// Y_i = (K u)_i + sigma z_i with z_i standard normal. In white-noise units this
// is sigma_w = sigma sqrt(h), which is what the constraint set receives.

#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "smre/config.hpp"
#include "smre/quantile.hpp"
#include "smre/solver.hpp"

namespace smre {

double white_noise_sigma(const Grid& grid, double regression_sigma);

/// Y = K u + sigma z with per-cell standard normals z from stream `replicate`.
Signal make_data(const ForwardOperator& op, const Signal& truth, double regression_sigma, std::uint64_t seed,
                 std::uint64_t replicate);

/// quantile.q when given, otherwise the simulated (1 - alpha)-quantile.
double resolve_quantile(const ExperimentConfig& cfg, const Dictionary& dict);

/// Kolmogorov-Smirnov distance between the empirical law of `x` and N(0, 1).
double ks_statistic(std::vector<double> x);

/// (theoretical_quantile, sample_quantile) pairs with plotting positions (i - 1/2) / n.
std::vector<std::pair<double, double>> qq_points(std::vector<double> x);

/// lambda with mean squared residual |Y - K u_lambda|^2 = sigma^2 (discrepancy
/// principle), found by bisection in log lambda.
double discrepancy_lambda(const ForwardOperator& op, const Signal& Y, const Penalty& p, double regression_sigma,
                          const SolverConfig& cfg);

/// CSV with header `iter,primal_res,dual_res,objective,max_violation`.
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history);

struct DemoReport {
  double q = 0.0;
  double lambda = 0.0;
  double ks_smre = 0.0;
  double ks_pls = 0.0;
  double J_truth = 0.0;
  double J_smre = 0.0;
  double J_pls = 0.0;
  double T_smre = 0.0;  // statistic of the SMRE residual
  double T_pls = 0.0;
  bool feasible = false;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Solves the SMRE and the discrepancy-tuned penalized least squares problem
/// for one data set. Writes truth, data, estimates, residuals, qq data and
/// diagnostics into `out_dir` unless it is empty.
DemoReport run_denoise_demo(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {});

struct CoverageReport {
  std::size_t replications = 0;
  std::size_t covered = 0;     // J(u_hat) <= J(u_truth) + 1e-9
  std::size_t nonconverged = 0;
  double frequency = 0.0;
  double ci_low = 0.0;         // Wilson 95% interval
  double ci_high = 0.0;
  double threshold = 0.0;      // 1 - alpha - 3 sqrt(alpha (1 - alpha) / R)
  bool degenerate_ci = false;  // R < 2
  double q = 0.0;
  double J_truth = 0.0;
  std::vector<double> J_hat;
};

CoverageReport run_coverage(const ExperimentConfig& cfg);

struct ConsistencyRow {
  int k = 0;
  double sigma = 0.0;
  std::size_t N = 0;
  double eta = 0.0;
  double alpha = 0.0;
  double zeta = 0.0;
  double q = 0.0;
  double bregman = 0.0;      // median over seeds of D(u_hat, u_truth)
  double image_error = 0.0;  // median over seeds of max_n |<psi_n, K u_hat - K u_truth>|
  double bregman_ratio = 0.0;
  double image_ratio = 0.0;
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  double bregman_spread = 1.0;  // max / min of bregman_ratio
  double image_spread = 1.0;
  bool fitted = false;          // at least two rows
  double slope = 0.0;           // least-squares slope of log D against log eta
  bool alpha_summable = true;
};

/// Diagonal operator, ellipsoid source p with u = K* p, squared-norm penalty:
/// sigma_k = 2^-k for k in [k_min, k_max], (N_k, alpha_k) from the
/// orthonormal schedule, closed-form SMRE with the exact orthonormal quantile.
ConsistencyReport run_consistency(const ExperimentConfig& cfg);

void write_coverage_csv(const std::filesystem::path& path, const CoverageReport& r);
void write_consistency_csv(const std::filesystem::path& path, const ConsistencyReport& r);

}  // namespace smre
