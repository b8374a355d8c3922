#include "smre/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "smre/detail/format.hpp"
#include "smre/error.hpp"
#include "smre/rates.hpp"
#include "smre/signal_io.hpp"

namespace smre {

using detail::format_double;

namespace {

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string());
  out << header << '\n';
  return out;
}

template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> standardized_residual(const Signal& Y, const Signal& fit, double sigma) {
  std::vector<double> r(Y.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (Y[i] - fit[i]) / sigma;
  return r;
}

void write_qq(const std::filesystem::path& path, const std::vector<double>& x) {
  auto out = open_csv(path, "theoretical_quantile,sample_quantile");
  for (const auto& [t, s] : qq_points(x)) out << format_double(t) << ',' << format_double(s) << '\n';
}

}  // namespace

double white_noise_sigma(const Grid& grid, double regression_sigma) {
  return regression_sigma * std::sqrt(grid.cell_measure());
}

Signal make_data(const ForwardOperator& op, const Signal& truth, double regression_sigma, std::uint64_t seed,
                 std::uint64_t replicate) {
  Signal Y = op.apply(truth);
  if (regression_sigma == 0.0) return Y;
  const Grid& g = truth.grid();
  const Signal eps = draw_white_noise(g, NoiseModel{1.0, seed}, replicate);
  Y += white_noise_sigma(g, regression_sigma) * eps;
  return Y;
}

double resolve_quantile(const ExperimentConfig& cfg, const Dictionary& dict) {
  if (cfg.quantile.q) return *cfg.quantile.q;
  const auto table = simulate(dict, cfg.family, cfg.quantile.draws, cfg.quantile.seed, cfg.threads);
  return quantile(table, cfg.quantile.alpha);
}

double ks_statistic(std::vector<double> x) {
  require(!x.empty(), "ks_statistic: empty sample");
  std::sort(x.begin(), x.end());
  const boost::math::normal_distribution<double> nd;
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = boost::math::cdf(nd, x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<std::pair<double, double>> qq_points(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const boost::math::normal_distribution<double> nd;
  const auto n = static_cast<double>(x.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.emplace_back(boost::math::quantile(nd, (static_cast<double>(i) + 0.5) / n), x[i]);
  return out;
}

double discrepancy_lambda(const ForwardOperator& op, const Signal& Y, const Penalty& p, double regression_sigma,
                          const SolverConfig& cfg) {
  require(regression_sigma > 0.0, "discrepancy_lambda: sigma must be positive");
  const double target = regression_sigma * regression_sigma;
  auto misfit = [&](double log_lambda) {
    const Signal u = solve_penalized_ls(op, Y, p, std::exp(log_lambda), cfg);
    const double r = norm(Y - op.apply(u));
    return r * r - target;
  };
  double lo = std::log(1e-12), hi = std::log(1e8);
  if (misfit(lo) >= 0.0) return std::exp(lo);
  if (misfit(hi) <= 0.0) return std::exp(hi);
  for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    (misfit(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history) {
  auto out = open_csv(path, "iter,primal_res,dual_res,objective,max_violation");
  for (const auto& r : history)
    out << r.iter << ',' << format_double(r.primal_res) << ',' << format_double(r.dual_res) << ','
        << format_double(r.objective) << ',' << format_double(r.max_violation) << '\n';
}

DemoReport run_denoise_demo(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  if (cfg.noise.sigma <= 0.0) throw ConfigError("demo: noise.sigma must be positive");
  const Grid grid = make_grid(cfg);
  const auto dict = make_dictionary(cfg, grid);
  const ForwardOperator op = make_operator(cfg, grid);
  const Signal truth = make_truth(cfg, grid);
  const Signal Y = make_data(op, truth, cfg.noise.sigma, cfg.noise.seed, 0);
  const double sw = white_noise_sigma(grid, cfg.noise.sigma);

  DemoReport rep;
  rep.q = resolve_quantile(cfg, *dict);
  const ConstraintSet C = make_constraints(dict, cfg.family, rep.q, sw, Y);
  const SolverResult smre = solve_smre(op, Y, C, cfg.penalty, cfg.solver);
  rep.lambda = discrepancy_lambda(op, Y, cfg.penalty, cfg.noise.sigma, cfg.solver);
  const Signal pls = solve_penalized_ls(op, Y, cfg.penalty, rep.lambda, cfg.solver);

  const Signal fit_smre = op.apply(smre.estimate);
  const Signal fit_pls = op.apply(pls);
  const auto r_smre = standardized_residual(Y, fit_smre, cfg.noise.sigma);
  const auto r_pls = standardized_residual(Y, fit_pls, cfg.noise.sigma);
  rep.ks_smre = ks_statistic(r_smre);
  rep.ks_pls = ks_statistic(r_pls);
  rep.J_truth = eval_J(cfg.penalty, truth);
  rep.J_smre = eval_J(cfg.penalty, smre.estimate);
  rep.J_pls = eval_J(cfg.penalty, pls);
  const MrStatistic stat(*dict, cfg.family);
  rep.T_smre = stat.evaluate((1.0 / sw) * (Y - fit_smre)).value;
  rep.T_pls = stat.evaluate((1.0 / sw) * (Y - fit_pls)).value;
  rep.feasible = smre.feasible;
  rep.converged = smre.converged;
  rep.iterations = smre.iterations;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    io::write_csv(out_dir / "truth.csv", truth);
    io::write_csv(out_dir / "data.csv", Y);
    io::write_csv(out_dir / "smre.csv", smre.estimate);
    io::write_csv(out_dir / "pls.csv", pls);
    {
      auto out = open_csv(out_dir / "residuals.csv", "index,smre,pls");
      for (std::size_t i = 0; i < r_smre.size(); ++i)
        out << i << ',' << format_double(r_smre[i]) << ',' << format_double(r_pls[i]) << '\n';
    }
    write_qq(out_dir / "qq_smre.csv", r_smre);
    write_qq(out_dir / "qq_pls.csv", r_pls);
    write_diagnostics_csv(out_dir / "diagnostics.csv", smre.history);
    auto out = open_csv(out_dir / "summary.csv", "key,value");
    out << "q," << format_double(rep.q) << "\nlambda," << format_double(rep.lambda) << "\nks_smre,"
        << format_double(rep.ks_smre) << "\nks_pls," << format_double(rep.ks_pls) << "\nJ_truth,"
        << format_double(rep.J_truth) << "\nJ_smre," << format_double(rep.J_smre) << "\nJ_pls,"
        << format_double(rep.J_pls) << "\nT_smre," << format_double(rep.T_smre) << "\nT_pls,"
        << format_double(rep.T_pls) << "\nfeasible," << rep.feasible << "\nconverged," << rep.converged
        << "\niterations," << rep.iterations << '\n';
  }
  return rep;
}

CoverageReport run_coverage(const ExperimentConfig& cfg) {
  if (cfg.noise.sigma <= 0.0) throw ConfigError("coverage: noise.sigma must be positive");
  const Grid grid = make_grid(cfg);
  const auto dict = make_dictionary(cfg, grid);
  const ForwardOperator op = make_operator(cfg, grid);
  const Signal truth = make_truth(cfg, grid);
  const double sw = white_noise_sigma(grid, cfg.noise.sigma);
  const std::size_t R = cfg.replications;

  CoverageReport rep;
  rep.replications = R;
  rep.q = resolve_quantile(cfg, *dict);
  rep.J_truth = eval_J(cfg.penalty, truth);
  rep.J_hat.assign(R, 0.0);
  std::vector<char> conv(R, 0);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    const Signal Y = make_data(op, truth, cfg.noise.sigma, cfg.noise.seed, r);
    const ConstraintSet C = make_constraints(dict, cfg.family, rep.q, sw, Y);
    const SolverResult res = solve_smre(op, Y, C, cfg.penalty, cfg.solver);
    rep.J_hat[r] = res.objective;
    conv[r] = res.converged;
  });
  for (std::size_t r = 0; r < R; ++r) {
    rep.covered += rep.J_hat[r] <= rep.J_truth + 1e-9;
    rep.nonconverged += !conv[r];
  }
  const auto n = static_cast<double>(R);
  rep.frequency = static_cast<double>(rep.covered) / n;
  const double z = 1.959963984540054;
  const double den = 1.0 + z * z / n;
  const double centre = (rep.frequency + z * z / (2.0 * n)) / den;
  const double half = z * std::sqrt(rep.frequency * (1.0 - rep.frequency) / n + z * z / (4.0 * n * n)) / den;
  rep.ci_low = std::max(0.0, centre - half);
  rep.ci_high = std::min(1.0, centre + half);
  rep.degenerate_ci = R < 2;
  const double a = cfg.quantile.alpha;
  rep.threshold = 1.0 - a - 3.0 * std::sqrt(a * (1.0 - a) / n);
  return rep;
}

ConsistencyReport run_consistency(const ExperimentConfig& cfg) {
  if (cfg.op.kind != "diagonal_svd") throw ConfigError("consistency: problem.operator.kind must be diagonal_svd");
  if (cfg.penalty.kind != PenaltyKind::sq_l2) throw ConfigError("consistency: problem.penalty.kind must be sq_l2");
  if (cfg.rates.kind != "orthonormal") throw ConfigError("consistency: rates.kind must be orthonormal");
  const Grid grid = make_grid(cfg);
  const ForwardOperator op = make_operator(cfg, grid);
  const std::size_t n = grid.size();
  const SourceElement p = ellipsoid_source(cfg.rates.beta, cfg.rates.Q, n);

  // u = K* p: coefficients s_n theta_n in the diagonal basis.
  const auto& s = op.singular_values();
  std::vector<double> uc(n);
  for (std::size_t i = 0; i < n; ++i) uc[i] = s[i] * p.coeffs[i];
  const Signal truth = op.synthesis(uc);
  const Signal xi = op.adjoint(op.synthesis(p.coeffs));
  const Signal Ktruth = op.apply(truth);

  std::vector<double> sigmas;
  for (int k = cfg.rates.k_min; k <= cfg.rates.k_max; ++k) sigmas.push_back(std::ldexp(1.0, -k));
  const Schedule sched = schedule_orthonormal(p, sigmas, cfg.rates.kappa, std::min(cfg.rates.N_cap, n));

  ConsistencyReport rep;
  rep.alpha_summable = sched.alpha_summable;
  const std::size_t K = sigmas.size(), S = cfg.rates.seeds;
  require(S >= 1, "consistency: need at least one seed");
  std::vector<double> breg(K * S), img(K * S), qs(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& e = sched.entries[k];
    qs[k] = max_abs_normal_quantile(e.N, e.alpha) - std::sqrt(2.0 * std::log(static_cast<double>(e.N)));
  }
  const Penalty J = Penalty::sq_l2();
  parallel_for(K * S, cfg.threads, [&](std::size_t job) {
    const std::size_t k = job / S;
    const auto& e = sched.entries[k];
    const Signal eps = draw_white_noise(grid, NoiseModel{1.0, cfg.noise.seed}, job);
    const Signal Y = Ktruth + e.sigma * eps;
    const Signal u = solve_shrinkage(op, Y, e.N, qs[k], e.sigma);
    breg[job] = bregman(J, u, truth, xi).value;
    const auto c = op.analysis(op.apply(u) - Ktruth);
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    img[job] = m;
  });
  for (std::size_t k = 0; k < K; ++k) {
    const auto& e = sched.entries[k];
    ConsistencyRow row;
    row.k = cfg.rates.k_min + static_cast<int>(k);
    row.sigma = e.sigma;
    row.N = e.N;
    row.eta = e.eta;
    row.alpha = e.alpha;
    row.zeta = e.zeta;
    row.q = qs[k];
    row.bregman = median_of({breg.begin() + static_cast<std::ptrdiff_t>(k * S),
                             breg.begin() + static_cast<std::ptrdiff_t>((k + 1) * S)});
    row.image_error = median_of({img.begin() + static_cast<std::ptrdiff_t>(k * S),
                                 img.begin() + static_cast<std::ptrdiff_t>((k + 1) * S)});
    row.bregman_ratio = row.bregman / row.eta;
    row.image_ratio = row.image_error / row.zeta;
    rep.rows.push_back(row);
  }
  auto spread = [&](auto field) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rep.rows) {
      lo = std::min(lo, r.*field);
      hi = std::max(hi, r.*field);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  };
  rep.bregman_spread = spread(&ConsistencyRow::bregman_ratio);
  rep.image_spread = spread(&ConsistencyRow::image_ratio);
  if (rep.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto m = static_cast<double>(rep.rows.size());
    for (const auto& r : rep.rows) {
      const double x = std::log(r.eta), y = std::log(r.bregman);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.fitted = true;
  }
  return rep;
}

void write_coverage_csv(const std::filesystem::path& path, const CoverageReport& r) {
  auto out = open_csv(path, "replicate,J_hat,J_truth,covered");
  for (std::size_t i = 0; i < r.J_hat.size(); ++i)
    out << i << ',' << format_double(r.J_hat[i]) << ',' << format_double(r.J_truth) << ','
        << (r.J_hat[i] <= r.J_truth + 1e-9) << '\n';
}

void write_consistency_csv(const std::filesystem::path& path, const ConsistencyReport& r) {
  auto out = open_csv(path, "k,sigma,N,eta,alpha,zeta,q,bregman,image_error,bregman_ratio,image_ratio");
  for (const auto& row : r.rows)
    out << row.k << ',' << format_double(row.sigma) << ',' << row.N << ',' << format_double(row.eta) << ','
        << format_double(row.alpha) << ',' << format_double(row.zeta) << ',' << format_double(row.q) << ','
        << format_double(row.bregman) << ',' << format_double(row.image_error) << ','
        << format_double(row.bregman_ratio) << ',' << format_double(row.image_ratio) << '\n';
}

}  // namespace smre
