#include "smre/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "smre/error.hpp"
#include "smre/test_signals.hpp"

namespace smre {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

// Reads `key` from `tbl` into `out` when present; type mismatches are errors.
template <class T>
void read(const toml::table& tbl, const std::string& where, const char* key, T& out) {
  const toml::node* node = tbl.get(key);
  if (!node) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node->value_exact<bool>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->value_exact<std::string>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (auto v = node->value<double>()) {
      out = *v;
      return;
    }
  } else {
    if (auto v = node->value_exact<std::int64_t>()) {
      if (*v < 0 && std::is_unsigned_v<T>) fail(where + "." + key + " must be non-negative");
      out = static_cast<T>(*v);
      return;
    }
  }
  fail(where + "." + key + " has the wrong type");
}

void check_keys(const toml::table& tbl, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [k, v] : tbl) {
    (void)v;
    if (!allowed.count(std::string(k.str()))) fail("unknown key " + where + "." + std::string(k.str()));
  }
}

const toml::table* sub(const toml::table& tbl, const std::string& where, const char* key) {
  const toml::node* node = tbl.get(key);
  if (!node) return nullptr;
  if (const auto* t = node->as_table()) return t;
  fail(where + "." + key + " must be a table");
}

void parse_problem(const toml::table& t, ExperimentConfig& cfg) {
  check_keys(t, "problem", {"grid", "signal", "operator", "penalty", "dictionary", "statistic"});
  if (const toml::node* g = t.get("grid")) {
    const auto* arr = g->as_array();
    if (!arr || arr->empty() || arr->size() > 2) fail("problem.grid must be an array of one or two sizes");
    cfg.grid.clear();
    for (const auto& e : *arr) {
      auto v = e.value_exact<std::int64_t>();
      if (!v || *v < 1) fail("problem.grid entries must be positive integers");
      cfg.grid.push_back(static_cast<std::size_t>(*v));
    }
  }
  if (const auto* s = sub(t, "problem", "signal")) {
    read(*s, "problem.signal", "name", cfg.signal.name);
    for (const auto& [k, v] : *s) {
      if (k.str() == "name") continue;
      auto d = v.value<double>();
      if (!d) fail("problem.signal." + std::string(k.str()) + " must be numeric");
      cfg.signal.params[std::string(k.str())] = *d;
    }
  }
  if (const auto* o = sub(t, "problem", "operator")) {
    check_keys(*o, "problem.operator", {"kind", "kernel", "width", "boundary", "decay"});
    read(*o, "problem.operator", "kind", cfg.op.kind);
    read(*o, "problem.operator", "kernel", cfg.op.kernel);
    read(*o, "problem.operator", "width", cfg.op.width);
    read(*o, "problem.operator", "boundary", cfg.op.boundary);
    read(*o, "problem.operator", "decay", cfg.op.decay);
    if (cfg.op.kind != "identity" && cfg.op.kind != "diagonal_svd" && cfg.op.kind != "convolution")
      fail("problem.operator.kind: unknown operator '" + cfg.op.kind + "'");
    if (cfg.op.boundary != "periodic" && cfg.op.boundary != "zero_padded")
      fail("problem.operator.boundary must be periodic or zero_padded");
  }
  if (const auto* p = sub(t, "problem", "penalty")) {
    check_keys(*p, "problem.penalty", {"kind", "paper_scaling", "tv_tol", "tv_max_iter"});
    std::string kind = "sq_h1";
    read(*p, "problem.penalty", "kind", kind);
    if (kind == "sq_l2") cfg.penalty = Penalty::sq_l2();
    else if (kind == "sq_h1") cfg.penalty = Penalty::sq_h1();
    else if (kind == "tv") cfg.penalty = Penalty::tv();
    else if (kind == "negentropy") cfg.penalty = Penalty::negentropy();
    else fail("problem.penalty.kind: unknown penalty '" + kind + "'");
    read(*p, "problem.penalty", "paper_scaling", cfg.penalty.paper_scaling);
    read(*p, "problem.penalty", "tv_tol", cfg.penalty.tv_tol);
    read(*p, "problem.penalty", "tv_max_iter", cfg.penalty.tv_max_iter);
  }
  if (const auto* d = sub(t, "problem", "dictionary")) {
    check_keys(*d, "problem.dictionary", {"kind", "max_len", "min_len", "max_level", "count"});
    read(*d, "problem.dictionary", "kind", cfg.dictionary.kind);
    read(*d, "problem.dictionary", "max_len", cfg.dictionary.max_len);
    read(*d, "problem.dictionary", "min_len", cfg.dictionary.min_len);
    read(*d, "problem.dictionary", "max_level", cfg.dictionary.max_level);
    read(*d, "problem.dictionary", "count", cfg.dictionary.count);
    const auto& k = cfg.dictionary.kind;
    if (k != "intervals" && k != "dyadic" && k != "trigonometric")
      fail("problem.dictionary.kind: unknown dictionary '" + k + "'");
  }
  if (const auto* s = sub(t, "problem", "statistic")) {
    check_keys(*s, "problem.statistic", {"kind", "gamma"});
    std::string kind = "penalized_logN";
    double gamma = 0.0;
    read(*s, "problem.statistic", "kind", kind);
    read(*s, "problem.statistic", "gamma", gamma);
    if (kind == "penalized_logN") {
      cfg.family = MrFamily::penalized_logN();
    } else if (kind == "scale_calibrated") {
      if (gamma <= 0.0) fail("problem.statistic.gamma must be positive for scale_calibrated");
      cfg.family = MrFamily::scale_calibrated(gamma);
    } else if (kind == "plain") {
      cfg.family = MrFamily::plain();
    } else {
      fail("problem.statistic.kind: unknown statistic '" + kind + "'");
    }
  }
}

void validate(const ExperimentConfig& cfg) {
  const std::size_t d = cfg.grid.size();
  if (cfg.dictionary.kind == "intervals" || cfg.dictionary.kind == "trigonometric") {
    if (d != 1) fail("problem.dictionary: " + cfg.dictionary.kind + " requires a 1-D grid");
  }
  if (cfg.dictionary.kind == "intervals") {
    if (cfg.dictionary.max_len < 1 || cfg.dictionary.max_len > cfg.grid[0])
      fail("problem.dictionary.max_len must lie in [1, n]");
    if (cfg.dictionary.min_len < 1 || cfg.dictionary.min_len > cfg.dictionary.max_len)
      fail("problem.dictionary.min_len must lie in [1, max_len]");
  }
  if (cfg.dictionary.kind == "dyadic") {
    if (cfg.dictionary.max_level < 0 || cfg.dictionary.max_level > 30)
      fail("problem.dictionary.max_level out of range");
    for (auto n : cfg.grid)
      if (n % (std::size_t{1} << cfg.dictionary.max_level) != 0)
        fail("problem.grid must be divisible by 2^max_level for the dyadic dictionary");
  }
  if (cfg.dictionary.kind == "trigonometric" && cfg.dictionary.count > cfg.grid[0])
    fail("problem.dictionary.count exceeds the grid size");
  if (cfg.op.kind == "diagonal_svd" && d != 1) fail("problem.operator: diagonal_svd requires a 1-D grid");
  if (cfg.op.width <= 0.0) fail("problem.operator.width must be positive");
  if (cfg.op.kernel != "gaussian" && cfg.op.kernel != "box" && cfg.op.kernel != "delta")
    fail("problem.operator.kernel must be gaussian, box or delta");
  static const std::set<std::string> signals{"bumps_kinks_jumps", "step", "disc_2d", "hoelder_beta", "linear",
                                             "constant"};
  if (!signals.count(cfg.signal.name)) fail("problem.signal.name: unknown test signal '" + cfg.signal.name + "'");
  if (cfg.signal.name == "bumps_kinks_jumps" && d != 1) fail("problem.signal: bumps_kinks_jumps requires a 1-D grid");
  if (cfg.signal.name == "disc_2d" && d != 2) fail("problem.signal: disc_2d requires a 2-D grid");
  if (cfg.noise.sigma < 0.0) fail("noise.sigma must be non-negative");
  if (!(cfg.quantile.alpha > 0.0 && cfg.quantile.alpha < 1.0)) fail("quantile.alpha must lie in (0, 1)");
  if (cfg.quantile.draws < 2) fail("quantile.draws must be at least 2");
  if (cfg.solver.rho <= 0.0 || cfg.solver.max_outer == 0) fail("solver: rho and max_outer must be positive");
  if (cfg.rates.k_min > cfg.rates.k_max) fail("rates.k_min must not exceed rates.k_max");
  if (cfg.rates.kappa <= 0.0 || cfg.rates.beta <= 0.0 || cfg.rates.Q <= 0.0)
    fail("rates: kappa, beta and Q must be positive");
  if (cfg.rates.kind != "orthonormal" && cfg.rates.kind != "dyadic")
    fail("rates.kind must be orthonormal or dyadic");
  if (cfg.replications < 1) fail("run.replications must be at least 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config syntax error: " << e.description() << " at line " << e.source().begin.line;
    fail(msg.str());
  }
  check_keys(root, "config", {"problem", "noise", "quantile", "solver", "rates", "run", "output"});
  ExperimentConfig cfg;
  if (const auto* t = sub(root, "config", "problem")) parse_problem(*t, cfg);
  if (const auto* t = sub(root, "config", "noise")) {
    check_keys(*t, "noise", {"sigma", "seed"});
    read(*t, "noise", "sigma", cfg.noise.sigma);
    read(*t, "noise", "seed", cfg.noise.seed);
  }
  if (const auto* t = sub(root, "config", "quantile")) {
    check_keys(*t, "quantile", {"alpha", "draws", "seed", "q"});
    read(*t, "quantile", "alpha", cfg.quantile.alpha);
    read(*t, "quantile", "draws", cfg.quantile.draws);
    read(*t, "quantile", "seed", cfg.quantile.seed);
    if (t->contains("q")) {
      double q = 0.0;
      read(*t, "quantile", "q", q);
      cfg.quantile.q = q;
    }
  }
  if (const auto* t = sub(root, "config", "solver")) {
    check_keys(*t, "solver", {"rho", "max_outer", "tol_primal", "tol_dual", "dykstra_max", "dykstra_tol",
                              "inner_prox_tol", "inner_max", "feasibility_tol", "adapt_rho"});
    auto& s = cfg.solver;
    read(*t, "solver", "rho", s.rho);
    read(*t, "solver", "max_outer", s.max_outer);
    read(*t, "solver", "tol_primal", s.tol_primal);
    read(*t, "solver", "tol_dual", s.tol_dual);
    read(*t, "solver", "dykstra_max", s.dykstra_max);
    read(*t, "solver", "dykstra_tol", s.dykstra_tol);
    read(*t, "solver", "inner_prox_tol", s.inner_prox_tol);
    read(*t, "solver", "inner_max", s.inner_max);
    read(*t, "solver", "feasibility_tol", s.feasibility_tol);
    read(*t, "solver", "adapt_rho", s.adapt_rho);
  }
  if (const auto* t = sub(root, "config", "rates")) {
    check_keys(*t, "rates", {"kind", "beta", "Q", "kappa", "k_min", "k_max", "seeds", "m_cap", "N_cap"});
    auto& r = cfg.rates;
    read(*t, "rates", "kind", r.kind);
    read(*t, "rates", "beta", r.beta);
    read(*t, "rates", "Q", r.Q);
    read(*t, "rates", "kappa", r.kappa);
    read(*t, "rates", "k_min", r.k_min);
    read(*t, "rates", "k_max", r.k_max);
    read(*t, "rates", "seeds", r.seeds);
    read(*t, "rates", "m_cap", r.m_cap);
    read(*t, "rates", "N_cap", r.N_cap);
  }
  if (const auto* t = sub(root, "config", "run")) {
    check_keys(*t, "run", {"replications", "threads"});
    read(*t, "run", "replications", cfg.replications);
    read(*t, "run", "threads", cfg.threads);
  }
  if (const auto* t = sub(root, "config", "output")) {
    check_keys(*t, "output", {"dir"});
    std::string dir = cfg.output_dir.string();
    read(*t, "output", "dir", dir);
    cfg.output_dir = dir;
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

Grid make_grid(const ExperimentConfig& cfg) { return Grid(cfg.grid); }

std::shared_ptr<const Dictionary> make_dictionary(const ExperimentConfig& cfg, const Grid& grid) {
  const auto& d = cfg.dictionary;
  if (d.kind == "intervals") return std::make_shared<const Dictionary>(build_intervals(grid, d.max_len, d.min_len));
  if (d.kind == "dyadic") return std::make_shared<const Dictionary>(build_dyadic(grid, d.max_level));
  return std::make_shared<const Dictionary>(build_trigonometric(grid, d.count == 0 ? grid.size() : d.count));
}

ForwardOperator make_operator(const ExperimentConfig& cfg, const Grid& grid) {
  const auto& o = cfg.op;
  if (o.kind == "identity") return ForwardOperator::identity(grid);
  if (o.kind == "diagonal_svd") {
    std::vector<double> s(grid.size());
    for (std::size_t n = 0; n < s.size(); ++n) s[n] = std::pow(static_cast<double>(n + 1), -o.decay);
    return ForwardOperator::diagonal_svd(grid, std::move(s));
  }
  const Signal kernel = make_kernel(grid, o.kernel, o.width);
  return ForwardOperator::convolution(kernel, o.boundary == "periodic" ? Boundary::periodic : Boundary::zero_padded);
}

Signal make_truth(const ExperimentConfig& cfg, const Grid& grid) {
  return make_test_signal(cfg.signal.name, grid, cfg.signal.params);
}

}  // namespace smre
