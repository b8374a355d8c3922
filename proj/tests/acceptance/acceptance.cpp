// Acceptance checks. Each criterion prints one PASS/FAIL line; all tolerances
// are fixed here. Run with `--criterion k` for a single check.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles/dense.hpp"
#include "smre/config.hpp"
#include "smre/harness.hpp"
#include "smre/penalties.hpp"
#include "smre/quantile.hpp"
#include "smre/rates.hpp"
#include "smre/solver.hpp"
#include "smre/test_signals.hpp"

using namespace smre;

namespace {

constexpr double kC1Low = 2.7, kC1High = 3.1, kC1Alpha = 0.01, kC1Seconds = 60.0;
constexpr std::size_t kC1Draws = 10000;
constexpr double kC2RelTol = 1e-4, kC2Seconds = 60.0;
constexpr int kC2Instances = 20;
constexpr double kC3Seconds = 600.0;
constexpr double kC4SeFactor = 3.0;
constexpr std::size_t kC4Draws = 10000;
constexpr double kC5Slack = 1e-12;
constexpr double kC6Tol = 1e-6;
constexpr int kC6Instances = 50;
constexpr double kC7MaxSpread = 10.0;
constexpr double kC8Rel = 1e-6;

const std::filesystem::path kConfigDir = SMRE_CONFIG_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int k, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %d %s: %s | %s\n", k, pass ? "PASS" : "FAIL", title, detail.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Signal random_signal(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Signal s(g);
  for (auto& x : s.data()) x = nd(rng);
  return s;
}

// 1. Simulated quantile of the interval statistic on n = 1024.
bool criterion1() {
  const Grid g = Grid::line(1024);
  const auto t0 = Clock::now();
  const Dictionary dict = build_intervals(g, 20);
  const auto table = simulate(dict, MrFamily::plain(), kC1Draws, 7, 1);
  const double q = quantile(table, kC1Alpha);
  const double secs = seconds_since(t0);
  // Companion numbers: the literal "1 - alpha = 0.01" reading and lengths 2..21.
  const double q_low = quantile(table, 1.0 - kC1Alpha);
  const auto alt = simulate(build_intervals(g, 21, 2), MrFamily::plain(), kC1Draws, 7, 1);
  const bool pass = q >= kC1Low && q <= kC1High && secs < kC1Seconds;
  return report(1, "quantile reproduction", pass,
                fmt("q(0.01)=%.4f se=%.4f window=[%.1f,%.1f] N=%zu runtime=%.2fs (limit %.0fs); "
                    "companion: q at level 0.99=%.4f, lengths 2..21 q(0.01)=%.4f",
                    q, quantile_se(table, kC1Alpha), kC1Low, kC1High, dict.size(), secs, kC1Seconds, q_low,
                    quantile(alt, kC1Alpha)));
}

// 2. General ADMM against closed-form shrinkage for a diagonal operator.
bool criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  const Grid g = Grid::line(256);
  std::vector<double> s(256);
  for (std::size_t i = 0; i < 256; ++i) s[i] = 1.0 / static_cast<double>(i + 1);
  const auto op = ForwardOperator::diagonal_svd(g, s);
  SolverConfig cfg;
  cfg.tol_primal = cfg.tol_dual = 1e-10;
  cfg.dykstra_tol = 1e-12;
  cfg.max_outer = 20000;
  double worst = 0.0;
  int unconverged = 0, zero_refs = 0;
  std::uniform_int_distribution<std::size_t> pickN(8, 256);
  std::uniform_real_distribution<double> pickq(0.0, 1.5), picks(0.005, 0.1);
  for (int t = 0; t < kC2Instances; ++t) {
    const std::size_t N = pickN(rng);
    const double q = pickq(rng), sigma = picks(rng);
    // truth with O(1) basis coefficients, so that most survive the threshold
    std::vector<double> coeffs(256);
    for (auto& c : coeffs) c = std::normal_distribution<double>(0.0, 5.0)(rng);
    const Signal truth = op.synthesis(coeffs);
    const Signal Y = op.apply(truth) + sigma * draw_white_noise(g, {1.0, 99}, static_cast<std::uint64_t>(t));
    auto dict = std::make_shared<const Dictionary>(build_trigonometric(g, N));
    const auto C = make_constraints(dict, MrFamily::penalized_logN(), q, sigma, Y);
    const auto res = solve_smre(op, Y, C, Penalty::sq_l2(), cfg);
    unconverged += !res.converged;
    const Signal ref = solve_shrinkage(op, Y, N, q, sigma);
    const double rel = norm(res.estimate - ref) / std::max(norm(ref), 1e-300);
    worst = std::max(worst, rel);
    zero_refs += norm(ref) == 0.0;
  }
  const double secs = seconds_since(t0);
  const bool pass = worst <= kC2RelTol && secs < kC2Seconds && unconverged == 0 && zero_refs == 0;
  return report(2, "shrinkage oracle equivalence", pass,
                fmt("instances=%d max relative L2 error=%.3e (tol %.0e) unconverged=%d zero references=%d runtime=%.2fs (limit %.0fs)",
                    kC2Instances, worst, kC2RelTol, unconverged, zero_refs, secs, kC2Seconds));
}

// 3. Coverage of J(u_hat) <= J(u_truth).
bool criterion3() {
  const auto t0 = Clock::now();
  auto cfg = load_config(kConfigDir / "coverage.toml");
  cfg.replications = 500;
  cfg.quantile.alpha = 0.1;
  cfg.grid = {256};
  cfg.threads = 1;
  const auto rep = run_coverage(cfg);
  const double secs = seconds_since(t0);
  const double threshold = 0.9 - 3.0 * std::sqrt(0.09 / 500.0);
  const bool pass = rep.frequency >= threshold && secs < kC3Seconds;
  return report(3, "coverage", pass,
                fmt("R=%zu frequency=%.4f (threshold %.4f) wilson95=[%.4f,%.4f] q=%.4f nonconverged=%zu "
                    "runtime=%.1fs (limit %.0fs)",
                    rep.replications, rep.frequency, threshold, rep.ci_low, rep.ci_high, rep.q, rep.nonconverged,
                    secs, kC3Seconds));
}

// 4. Borel concentration bound on the simulated quantiles.
bool criterion4() {
  struct Setup {
    std::string name;
    Dictionary dict;
    MrFamily family;
  };
  std::vector<Setup> setups;
  setups.push_back({"intervals n=1024", build_intervals(Grid::line(1024), 20), MrFamily::plain()});
  setups.push_back({"dyadic 64x64 levels 0..5", build_dyadic(Grid::square(64), 5), MrFamily::scale_calibrated(2.0)});
  setups.push_back({"trigonometric n=1024 N=256", build_trigonometric(Grid::line(1024), 256),
                    MrFamily::penalized_logN()});
  bool pass = true;
  std::string detail;
  for (const auto& s : setups) {
    const auto table = simulate(s.dict, s.family, kC4Draws, 41, 0);
    const double med = median(table);
    for (double alpha : {0.01, 0.05}) {
      const double q = quantile(table, alpha);
      const double bound = borel_bound(med, s.family.lipschitz, alpha) + kC4SeFactor * quantile_se(table, alpha);
      pass = pass && q <= bound;
      detail += fmt("%s a=%.2f q=%.4f bound=%.4f; ", s.name.c_str(), alpha, q, bound);
    }
  }
  return report(4, "Borel quantile bound", pass, detail);
}

// 5. Level-weighted piecewise-constant approximation certificate.
bool criterion5() {
  struct Fixture {
    std::string name;
    Signal g;
  };
  const Grid line = Grid::line(1024);
  Signal root(line);
  for (std::size_t i = 0; i < 1024; ++i) root[i] = std::sqrt(line.center(0, i));
  const std::vector<Fixture> fixtures{
      {"linear", hoelder_beta(line, 1.0)}, {"sqrt", root}, {"hoelder2d", hoelder_beta(Grid::square(128), 0.5)}};
  bool pass = true;
  double worst_excess = -1e300, worst_mass = 0.0, worst_raw = 0.0;
  for (const auto& f : fixtures) {
    const double sup = max_abs(f.g);
    for (int m = 1; m <= 6; ++m) {
      const auto a = pw_const_approx(f.g, m);
      pass = pass && a.error_sq <= a.bound + kC5Slack && a.weighted_mass <= sup + kC5Slack && !a.degenerate;
      worst_excess = std::max(worst_excess, a.error_sq - a.bound);
      worst_mass = std::max(worst_mass, a.weighted_mass / sup);
      worst_raw = std::max(worst_raw, a.coeff_abs_sum / sup);
    }
  }
  return report(5, "piecewise-constant approximation certificate", pass,
                fmt("max(error^2 - bound)=%.3e (slack %.0e) max measure-weighted sum|b| / sup|g|=%.4f; "
                    "companion: max unweighted sum|b| / sup|g|=%.2f",
                    worst_excess, kC5Slack, worst_mass, worst_raw));
}

// 6. Dykstra projection against the active-set oracle.
bool criterion6() {
  std::mt19937_64 rng(66);
  std::uniform_int_distribution<std::size_t> pickk(1, 8);
  const Grid g = Grid::line(16);
  SolverConfig cfg;
  cfg.dykstra_tol = 1e-12;
  cfg.dykstra_max = 200000;
  double worst = 0.0, worst_fixed = 0.0;
  int missing = 0;
  for (int t = 0; t < kC6Instances; ++t) {
    const std::size_t k = pickk(rng);
    std::vector<Signal> atoms;
    for (std::size_t j = 0; j < k; ++j) {
      Signal a = random_signal(g, rng);
      atoms.push_back((0.95 / norm(a)) * a);
    }
    auto dict = std::make_shared<const Dictionary>(build_custom(g, atoms));
    const auto C = make_constraints(dict, MrFamily::plain(), 0.2, 0.5, random_signal(g, rng, 0.3));
    const Signal w = random_signal(g, rng, 2.0);
    const auto r = project_admissible(C, w, cfg);
    std::vector<Eigen::VectorXd> a;
    std::vector<double> lo, hi;
    for (std::size_t n = 0; n < k; ++n) {
      a.push_back(oracle::dual_dense(*dict, n));
      lo.push_back(C.centers[n] - C.bounds[n]);
      hi.push_back(C.centers[n] + C.bounds[n]);
    }
    const auto ref = oracle::slab_projection(oracle::vec(w), a, lo, hi, g.cell_measure());
    if (!ref || !r.converged) {
      ++missing;
      continue;
    }
    worst = std::max(worst, std::sqrt(g.cell_measure()) * (oracle::vec(r.w) - *ref).norm());
    // feasible inputs: the data itself and the projected point
    for (const Signal& x : {C.data, r.w}) {
      const auto again = project_admissible(C, x, cfg);
      worst_fixed = std::max(worst_fixed, norm(again.w - x));
    }
  }
  const bool pass = missing == 0 && worst <= kC6Tol && worst_fixed <= cfg.dykstra_tol;
  return report(6, "projection correctness", pass,
                fmt("instances=%d max distance to oracle=%.3e (tol %.0e) max fixed-point move=%.3e (dykstra_tol %.0e) "
                    "failures=%d",
                    kC6Instances, worst, kC6Tol, worst_fixed, cfg.dykstra_tol, missing));
}

// 7. Bounded error ratios along the orthonormal schedule.
bool criterion7() {
  auto cfg = load_config(kConfigDir / "consistency.toml");
  cfg.rates.k_min = 6;
  cfg.rates.k_max = 12;
  cfg.rates.seeds = 20;
  cfg.rates.beta = 1.0;
  const auto rep = run_consistency(cfg);
  const bool pass = rep.bregman_spread <= kC7MaxSpread && rep.image_spread <= kC7MaxSpread;
  std::string detail = fmt("spread(D/eta)=%.3f spread(img/zeta)=%.3f (limit %.0f) slope=%.3f; ", rep.bregman_spread,
                           rep.image_spread, kC7MaxSpread, rep.slope);
  for (const auto& r : rep.rows) detail += fmt("k=%d N=%zu D/eta=%.4g img/zeta=%.4g; ", r.k, r.N, r.bregman_ratio,
                                               r.image_ratio);
  return report(7, "consistency ratios", pass, detail);
}

// 8. Penalty suite.
bool criterion8() {
  std::mt19937_64 rng(88);
  double worst_prox = -1e300;
  auto subgrad_excess = [&](const Penalty& p, const Signal& w, const Signal& xi) {
    double worst = -1e300;
    for (int t = 0; t < 200; ++t) {
      const Signal x = w + random_signal(w.grid(), rng, t < 100 ? 0.05 : 1.0);
      const double Jx = eval_J(p, x), Jw = eval_J(p, w);
      const double scale = 1.0 + std::abs(Jx) + std::abs(Jw);
      worst = std::max(worst, (Jw + inner(xi, x - w) - Jx) / scale);
    }
    return worst;
  };
  for (const Grid& g : {Grid::line(128), Grid({24, 24})})
    for (const auto& p : {Penalty::sq_l2(), Penalty::sq_h1(), Penalty::sq_h1(true), Penalty::tv()})
      for (double tau : {0.01, 0.3}) {
        const Signal v = random_signal(g, rng);
        const Signal w = prox_J(p, v, tau);
        worst_prox = std::max(worst_prox, subgrad_excess(p, w, (1.0 / tau) * (v - w)));
      }

  double worst_l2 = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Grid g = Grid::line(64);
    const Signal u = random_signal(g, rng), v = random_signal(g, rng);
    const double ref = 0.5 * std::pow(norm(v - u), 2);
    worst_l2 = std::max(worst_l2, std::abs(bregman(Penalty::sq_l2(), v, u).value - ref) / ref);
  }
  Signal pos(Grid::line(64));
  for (auto& x : pos.data()) x = 0.1 + std::abs(std::normal_distribution<double>()(rng));
  const double kl_self = std::abs(bregman(Penalty::negentropy(), pos, pos).value);

  double worst_step = 0.0;
  for (std::size_t n : {2, 8, 64, 1000, 4096}) worst_step = std::max(worst_step, std::abs(eval_J(Penalty::tv(), step(Grid::line(n), 0.5, 1.0)) - 1.0));
  const Grid sq = Grid::square(64);
  Signal edge(sq);
  for (std::size_t i = 32; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) edge.at(i, j) = 1.0;
  worst_step = std::max(worst_step, std::abs(eval_J(Penalty::tv(), edge) - 1.0));

  const Grid g = Grid::square(128);
  const Signal disc = disc_2d(g, 0.5, 0.5, 0.25);
  const Signal xi = tv_subgradient_witness(disc, DiscExtension{0.5, 0.5, 0.25, 0.1});
  const double disc_excess = subgrad_excess(Penalty::tv(), disc, xi);

  const bool pass = worst_prox <= kC8Rel && worst_l2 <= 1e-12 && kl_self <= 1e-14 && worst_step <= 1e-12 &&
                    disc_excess <= kC8Rel;
  return report(8, "penalty suite", pass,
                fmt("prox subgradient excess=%.2e (tol %.0e) sq_l2 Bregman rel.err=%.1e KL(u,u)=%.1e "
                    "max|TV(step)-1|=%.1e disc witness excess=%.2e",
                    worst_prox, kC8Rel, worst_l2, kl_self, worst_step, disc_excess));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  const std::vector<std::function<bool()>> checks{criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7, criterion8};
  bool all = true;
  for (int k = 1; k <= 8; ++k) {
    if (only != 0 && k != only) continue;
    try {
      all = checks[static_cast<std::size_t>(k - 1)]() && all;
    } catch (const std::exception& e) {
      report(k, "error", false, e.what());
      all = false;
    }
  }
  return all ? 0 : 1;
}
