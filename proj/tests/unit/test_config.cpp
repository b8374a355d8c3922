#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "smre/config.hpp"
#include "smre/error.hpp"

using namespace smre;

namespace {

const std::string good = R"(
[problem]
grid = [128]
signal = { name = "step", at = 0.25, height = 2.0 }
operator = { kind = "convolution", kernel = "box", width = 0.05, boundary = "zero_padded" }
penalty = { kind = "tv" }
dictionary = { kind = "intervals", max_len = 10, min_len = 2 }
statistic = { kind = "scale_calibrated", gamma = 1.5 }

[noise]
sigma = 0.2
seed = 9

[quantile]
alpha = 0.1
draws = 500
seed = 4
q = 1.5

[solver]
rho = 2.0
max_outer = 300

[rates]
kind = "dyadic"
k_min = 3
k_max = 5

[run]
replications = 12
threads = 1

[output]
dir = "somewhere"
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("a complete configuration parses") {
  const auto cfg = parse_config(good);
  CHECK(cfg.grid == std::vector<std::size_t>{128});
  CHECK(cfg.signal.name == "step");
  CHECK(cfg.signal.params.at("height") == 2.0);
  CHECK(cfg.op.kind == "convolution");
  CHECK(cfg.op.boundary == "zero_padded");
  CHECK(cfg.penalty.kind == PenaltyKind::tv);
  CHECK(cfg.dictionary.max_len == 10);
  CHECK(cfg.dictionary.min_len == 2);
  CHECK(cfg.family.kind == MrFamilyKind::scale_calibrated);
  CHECK(cfg.family.gamma == 1.5);
  CHECK(cfg.noise.sigma == 0.2);
  CHECK(cfg.noise.seed == 9);
  CHECK(cfg.quantile.q.value() == 1.5);
  CHECK(cfg.solver.rho == 2.0);
  CHECK(cfg.solver.max_outer == 300);
  CHECK(cfg.rates.kind == "dyadic");
  CHECK(cfg.replications == 12);
  CHECK(cfg.threads == 1);
  CHECK(cfg.output_dir == "somewhere");

  const Grid g = make_grid(cfg);
  CHECK(g.size() == 128);
  CHECK(make_dictionary(cfg, g)->size() == build_intervals(g, 10, 2).size());
  CHECK(make_operator(cfg, g).boundary() == Boundary::zero_padded);
  const Signal truth = make_truth(cfg, g);
  CHECK(truth[0] == 0.0);
  CHECK(truth[127] == 2.0);
}

TEST_CASE("defaults and the shipped configurations") {
  const auto cfg = parse_config("[problem]\ngrid = [64]\n");
  CHECK(cfg.quantile.alpha == 0.05);
  CHECK_FALSE(cfg.quantile.q.has_value());
  CHECK(cfg.op.kind == "identity");
  const std::filesystem::path dir = SMRE_CONFIG_DIR;
  for (const char* name : {"demo.toml", "coverage.toml", "consistency.toml", "schedule_dyadic.toml"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(dir / name));
  }
  CHECK_THROWS_AS(load_config(dir / "missing.toml"), ConfigError);
}

TEST_CASE("bad configurations are rejected") {
  const std::vector<std::pair<std::string, std::string>> edits{
      {"grid = [128]", "grid = [128, 64, 2]"},
      {"grid = [128]", "grid = [0]"},
      {"grid = [128]", "grid = \"big\""},
      {"name = \"step\"", "name = \"nonsense\""},
      {"kind = \"convolution\"", "kind = \"blur\""},
      {"kernel = \"box\"", "kernel = \"triangle\""},
      {"width = 0.05", "width = -1.0"},
      {"boundary = \"zero_padded\"", "boundary = \"reflect\""},
      {"kind = \"tv\"", "kind = \"l1\""},
      {"max_len = 10", "max_len = 1000"},
      {"min_len = 2", "min_len = 11"},
      {"gamma = 1.5", "gamma = -1.0"},
      {"kind = \"scale_calibrated\"", "kind = \"weird\""},
      {"sigma = 0.2", "sigma = -0.2"},
      {"alpha = 0.1", "alpha = 1.5"},
      {"draws = 500", "draws = 1"},
      {"rho = 2.0", "rho = 0.0"},
      {"k_min = 3", "k_min = 9"},
      {"kind = \"dyadic\"", "kind = \"fancy\""},
      {"replications = 12", "replications = 0"},
      {"seed = 9", "seed = -3"},
      {"seed = 9", "seed = 9\nspeed = 3"},
      {"[run]", "[runn]"},
      {"sigma = 0.2", "sigma = \"x\""},
      {"dir = \"somewhere\"", "dir = "},
      {"name = \"step\"", "name = \"disc_2d\""},
  };
  for (const auto& [from, to] : edits) {
    CAPTURE(to);
    CHECK_THROWS_AS(parse_config(replace(good, from, to)), ConfigError);
  }
  // dictionary/grid consistency
  CHECK_THROWS_AS(parse_config("[problem]\ngrid = [32, 32]\ndictionary = { kind = \"intervals\" }\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\ngrid = [48, 48]\ndictionary = { kind = \"dyadic\", max_level = 5 }\n"
                               "signal = { name = \"constant\" }\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\ngrid = [32, 32]\noperator = { kind = \"diagonal_svd\" }\n"
                               "dictionary = { kind = \"dyadic\" }\nsignal = { name = \"constant\" }\n"),
                  ConfigError);
}
