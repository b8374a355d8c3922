// smre: command-line front end for the SMRE library.
//
// Exit codes: 0 success, 2 solver non-convergence, 3 configuration error,
// 1 any other failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "smre/config.hpp"
#include "smre/error.hpp"
#include "smre/harness.hpp"
#include "smre/quantile.hpp"
#include "smre/rates.hpp"
#include "smre/signal_io.hpp"
#include "smre/solver.hpp"
#include "smre/test_signals.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kNonConvergence = 2;
constexpr int kConfigError = 3;

struct Options {
  std::string config;
  std::optional<double> alpha;
  std::optional<std::size_t> draws;
  std::string out;
  std::string data;
  std::string diagnostics;
  std::string kind;
};

smre::ExperimentConfig load(const Options& o) {
  auto cfg = smre::load_config(o.config);
  if (o.alpha) {
    if (!(*o.alpha > 0.0 && *o.alpha < 1.0)) throw smre::ConfigError("--alpha must lie in (0, 1)");
    cfg.quantile.alpha = *o.alpha;
    cfg.quantile.q.reset();
  }
  if (o.draws) {
    if (*o.draws < 2) throw smre::ConfigError("--draws must be at least 2");
    cfg.quantile.draws = *o.draws;
  }
  return cfg;
}

int cmd_quantile(const Options& o) {
  const auto cfg = load(o);
  const smre::Grid grid = smre::make_grid(cfg);
  const auto dict = smre::make_dictionary(cfg, grid);
  const auto table = smre::simulate(*dict, cfg.family, cfg.quantile.draws, cfg.quantile.seed, cfg.threads);
  if (!o.out.empty()) smre::write_table_csv(o.out, table);
  const double a = cfg.quantile.alpha;
  std::printf("q[%g]=%.6f se=%.6f\n", a, smre::quantile(table, a), smre::quantile_se(table, a));
  return kOk;
}

int cmd_solve(const Options& o) {
  const auto cfg = load(o);
  const smre::Grid grid = smre::make_grid(cfg);
  const auto dict = smre::make_dictionary(cfg, grid);
  const smre::ForwardOperator op = smre::make_operator(cfg, grid);
  smre::Signal Y = o.data.empty()
                       ? smre::make_data(op, smre::make_truth(cfg, grid), cfg.noise.sigma, cfg.noise.seed, 0)
                       : smre::io::read_csv(o.data, grid);
  if (cfg.noise.sigma <= 0.0) throw smre::ConfigError("solve: noise.sigma must be positive");
  const double q = smre::resolve_quantile(cfg, *dict);
  const auto C = smre::make_constraints(dict, cfg.family, q, smre::white_noise_sigma(grid, cfg.noise.sigma), Y);
  const auto res = smre::solve_smre(op, Y, C, cfg.penalty, cfg.solver);
  if (!o.out.empty()) smre::io::write_csv(o.out, res.estimate);
  if (!o.diagnostics.empty()) smre::write_diagnostics_csv(o.diagnostics, res.history);
  std::printf("q=%.6f iterations=%zu objective=%.10g max_violation=%.3g feasible=%d converged=%d\n", q,
              res.iterations, res.objective, res.max_constraint_violation, res.feasible, res.converged);
  return res.converged ? kOk : kNonConvergence;
}

int cmd_schedule(const Options& o) {
  const auto cfg = load(o);
  const std::string kind = o.kind.empty() ? cfg.rates.kind : o.kind;
  std::vector<double> sigmas;
  for (int k = cfg.rates.k_min; k <= cfg.rates.k_max; ++k) sigmas.push_back(std::ldexp(1.0, -k));
  smre::Schedule s;
  if (kind == "orthonormal") {
    const auto p = smre::ellipsoid_source(cfg.rates.beta, cfg.rates.Q, cfg.rates.N_cap);
    s = smre::schedule_orthonormal(p, sigmas, cfg.rates.kappa, cfg.rates.N_cap);
  } else if (kind == "dyadic") {
    const smre::Grid grid = smre::make_grid(cfg);
    const double gamma = cfg.family.kind == smre::MrFamilyKind::scale_calibrated ? cfg.family.gamma : 0.0;
    s = smre::schedule_dyadic(smre::make_truth(cfg, grid), sigmas, cfg.rates.kappa, cfg.rates.m_cap, gamma);
  } else {
    throw smre::ConfigError("--kind must be orthonormal or dyadic");
  }
  // report k of sigma_k = 2^-k rather than the position in the sequence
  for (auto& e : s.entries) e.k += static_cast<std::size_t>(cfg.rates.k_min);
  if (!o.out.empty()) smre::write_schedule_csv(o.out, s);
  for (const auto& e : s.entries)
    std::printf("k=%zu sigma=%g N=%zu eta=%.6g alpha=%.6g zeta=%.6g\n", e.k, e.sigma, e.N, e.eta, e.alpha, e.zeta);
  if (!s.alpha_summable) std::printf("warning: partial sums of alpha_k do not look bounded\n");
  if (s.degenerate) std::printf("warning: vanishing modulus of continuity (degenerate schedule)\n");
  return kOk;
}

int cmd_demo(const Options& o) {
  const auto cfg = load(o);
  const std::filesystem::path dir = o.out.empty() ? cfg.output_dir : std::filesystem::path(o.out);
  const auto r = smre::run_denoise_demo(cfg, dir);
  std::printf("q=%.6f lambda=%.6g ks_smre=%.4f ks_pls=%.4f J_truth=%.6g J_smre=%.6g J_pls=%.6g\n", r.q, r.lambda,
              r.ks_smre, r.ks_pls, r.J_truth, r.J_smre, r.J_pls);
  std::printf("outputs written to %s\n", dir.string().c_str());
  return r.converged ? kOk : kNonConvergence;
}

int cmd_coverage(const Options& o) {
  const auto cfg = load(o);
  const auto r = smre::run_coverage(cfg);
  if (!o.out.empty()) smre::write_coverage_csv(o.out, r);
  std::printf("R=%zu covered=%zu frequency=%.4f ci=[%.4f, %.4f]%s threshold=%.4f nonconverged=%zu\n",
              r.replications, r.covered, r.frequency, r.ci_low, r.ci_high, r.degenerate_ci ? " (degenerate)" : "",
              r.threshold, r.nonconverged);
  return r.nonconverged == 0 ? kOk : kNonConvergence;
}

int cmd_consistency(const Options& o) {
  const auto cfg = load(o);
  const auto r = smre::run_consistency(cfg);
  if (!o.out.empty()) smre::write_consistency_csv(o.out, r);
  for (const auto& row : r.rows)
    std::printf("k=%d N=%zu eta=%.4g zeta=%.4g D=%.4g D/eta=%.4g img=%.4g img/zeta=%.4g\n", row.k, row.N, row.eta,
                row.zeta, row.bregman, row.bregman_ratio, row.image_error, row.image_ratio);
  if (r.fitted)
    std::printf("slope(log D vs log eta)=%.4f spread(D/eta)=%.3f spread(img/zeta)=%.3f\n", r.slope,
                r.bregman_spread, r.image_spread);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical multiresolution estimation"};
  app.require_subcommand(1);
  Options o;
  auto add = [&](const char* name, const char* help) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--config", o.config, "TOML experiment configuration")->required();
    return sc;
  };
  auto* q = add("quantile", "simulate T_N(eps) and report the (1 - alpha)-quantile");
  q->add_option("--alpha", o.alpha, "significance level");
  q->add_option("--draws", o.draws, "Monte-Carlo draws");
  q->add_option("--out", o.out, "CSV table `replicate,statistic`");
  auto* s = add("solve", "solve the SMRE problem for one data set");
  s->add_option("--data", o.data, "CSV data (`value`); synthesized from the config when omitted");
  s->add_option("--out", o.out, "CSV estimate");
  s->add_option("--diagnostics", o.diagnostics, "CSV iteration history");
  s->add_option("--alpha", o.alpha, "significance level (forces simulation of q)");
  s->add_option("--draws", o.draws, "Monte-Carlo draws");
  auto* sch = add("schedule", "parameter-choice schedule for sigma_k = 2^-k");
  sch->add_option("--kind", o.kind, "orthonormal | dyadic");
  sch->add_option("--out", o.out, "CSV `k,sigma,N,eta,alpha,zeta`");
  auto* d = add("demo", "denoising demo: SMRE against discrepancy-tuned penalized least squares");
  d->add_option("--out", o.out, "output directory");
  auto* c = add("coverage", "Monte-Carlo coverage of J(u_hat) <= J(u_truth)");
  c->add_option("--out", o.out, "CSV per replicate");
  c->add_option("--alpha", o.alpha, "significance level");
  c->add_option("--draws", o.draws, "Monte-Carlo draws for q");
  auto* k = add("consistency", "Bregman and image-side errors along sigma_k = 2^-k");
  k->add_option("--out", o.out, "CSV report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : 1;
  }

  try {
    if (*q) return cmd_quantile(o);
    if (*s) return cmd_solve(o);
    if (*sch) return cmd_schedule(o);
    if (*d) return cmd_demo(o);
    if (*c) return cmd_coverage(o);
    if (*k) return cmd_consistency(o);
  } catch (const smre::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const smre::ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
