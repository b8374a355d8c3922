#pragma once

// Experiment configuration read from a TOML file.
//
//   [problem]
//   grid = [1024]
//   signal = { name = "bumps_kinks_jumps" }
//   operator = { kind = "convolution", kernel = "gaussian", width = 0.02 }
//   penalty = { kind = "sq_h1", paper_scaling = true }
//   dictionary = { kind = "intervals", max_len = 20 }
//   statistic = { kind = "plain" }
//
//   [noise]
//   sigma = 0.05                   # per-cell regression noise level
//   seed = 1
//
//   [quantile]
//   alpha = 0.01
//   draws = 10000
//   seed = 7
//   q = 2.9                        # optional: skip the simulation
//
//   [solver]  rho, max_outer, tol_primal, tol_dual, dykstra_max, dykstra_tol,
//             inner_prox_tol, inner_max, feasibility_tol, adapt_rho
//   [rates]   kind, beta, Q, kappa, k_min, k_max, seeds, m_cap, N_cap
//   [run]     replications, threads
//   [output]  dir

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smre/dictionary.hpp"
#include "smre/mrstat.hpp"
#include "smre/operators.hpp"
#include "smre/penalties.hpp"
#include "smre/solver.hpp"

namespace smre {

struct SignalSpec {
  std::string name = "bumps_kinks_jumps";
  std::map<std::string, double> params;
};

struct OperatorSpec {
  std::string kind = "identity";  // identity | diagonal_svd | convolution
  std::string kernel = "gaussian";
  double width = 0.02;
  std::string boundary = "periodic";
  double decay = 2.0;             // diagonal_svd: s_n = n^-decay
};

struct DictionarySpec {
  std::string kind = "intervals";  // intervals | dyadic | trigonometric
  std::size_t max_len = 20;
  std::size_t min_len = 1;
  int max_level = 3;
  std::size_t count = 0;           // trigonometric; 0 = all cells
};

struct NoiseSpec {
  double sigma = 0.05;
  std::uint64_t seed = 1;
};

struct QuantileSpec {
  double alpha = 0.05;
  std::size_t draws = 10000;
  std::uint64_t seed = 7;
  std::optional<double> q;
};

struct RatesSpec {
  std::string kind = "orthonormal";  // orthonormal | dyadic
  double beta = 1.0;
  double Q = 1.0;
  double kappa = 1.0;
  int k_min = 6;
  int k_max = 12;
  std::size_t seeds = 20;
  int m_cap = 20;
  std::size_t N_cap = 1000000;
};

struct ExperimentConfig {
  std::vector<std::size_t> grid{256};
  SignalSpec signal;
  OperatorSpec op;
  Penalty penalty = Penalty::sq_h1();
  DictionarySpec dictionary;
  MrFamily family = MrFamily::penalized_logN();
  NoiseSpec noise;
  QuantileSpec quantile;
  SolverConfig solver;
  RatesSpec rates;
  std::size_t replications = 100;
  unsigned threads = 0;
  std::filesystem::path output_dir = "out";
};

/// Throws ConfigError on syntax errors, unknown kinds, bad types or values
/// and inconsistent dimensions.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

Grid make_grid(const ExperimentConfig& cfg);
std::shared_ptr<const Dictionary> make_dictionary(const ExperimentConfig& cfg, const Grid& grid);
ForwardOperator make_operator(const ExperimentConfig& cfg, const Grid& grid);
Signal make_truth(const ExperimentConfig& cfg, const Grid& grid);

}  // namespace smre
