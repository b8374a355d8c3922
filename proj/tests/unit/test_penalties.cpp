#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/dense.hpp"
#include "smre/error.hpp"
#include "smre/penalties.hpp"
#include "smre/test_signals.hpp"

using namespace smre;

namespace {

Signal random_signal(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Signal s(g);
  for (auto& x : s.data()) x = nd(rng);
  return s;
}

// Forward-difference matrix of one axis with Neumann boundary, unscaled.
Eigen::MatrixXd diff_matrix(const Grid& g, std::size_t axis) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const std::size_t n0 = g.extent(0), n1 = g.dim() == 2 ? g.extent(1) : 1;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      const auto row = static_cast<Eigen::Index>(i * n1 + j);
      if (axis == 0 && i + 1 < n0) {
        D(row, row) = -1.0;
        D(row, static_cast<Eigen::Index>((i + 1) * n1 + j)) = 1.0;
      }
      if (axis == 1 && j + 1 < n1) {
        D(row, row) = -1.0;
        D(row, row + 1) = 1.0;
      }
    }
  return D;
}

// L with J(u) = h u^T L u for sq_h1.
Eigen::MatrixXd h1_matrix(const Grid& g, bool paper_scaling) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const double w = paper_scaling ? 1.0 : std::pow(static_cast<double>(g.extent(a)), 2);
    const Eigen::MatrixXd D = diff_matrix(g, a);
    L += w * D.transpose() * D;
  }
  return L;
}

// Largest violation of J(x) >= J(w) + <xi, x - w> over random x near w.
double subgradient_violation(const Penalty& p, const Signal& w, const Signal& xi, std::mt19937_64& rng,
                             double* scale_out = nullptr) {
  double worst = -1e300, scale = 1.0 + std::abs(eval_J(p, w));
  for (int t = 0; t < 100; ++t) {
    const double r = t < 50 ? 0.1 : 2.0;
    const Signal x = w + random_signal(w.grid(), rng, r);
    const double lhs = eval_J(p, x), rhs = eval_J(p, w) + inner(xi, x - w);
    worst = std::max(worst, rhs - lhs);
    scale = std::max(scale, std::abs(lhs));
  }
  if (scale_out) *scale_out = scale;
  return worst;
}

}  // namespace

TEST_CASE("penalty values") {
  for (std::size_t n : {8, 64, 1000}) {
    const Grid g = Grid::line(n);
    CHECK(eval_J(Penalty::tv(), Signal(g, 3.0)) == 0.0);
    CHECK(eval_J(Penalty::sq_h1(), Signal(g, 3.0)) == 0.0);
    CHECK(eval_J(Penalty::tv(), step(g, 0.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_J(Penalty::tv(), step(g, 0.3, -2.5)) == doctest::Approx(2.5).epsilon(1e-14));
  }
  const Grid g = Grid::line(10);
  CHECK(eval_J(Penalty::sq_l2(), Signal(g, 1.0)) == doctest::Approx(0.5));
  // paper scaling: (1/n) sum |u_{k+1} - u_k|^2
  Signal ramp(g);
  for (std::size_t i = 0; i < 10; ++i) ramp[i] = static_cast<double>(i * i);
  double ref = 0.0;
  for (std::size_t i = 0; i + 1 < 10; ++i) ref += std::pow(ramp[i + 1] - ramp[i], 2);
  CHECK(eval_J(Penalty::sq_h1(true), ramp) == doctest::Approx(ref / 10.0));
  CHECK(eval_J(Penalty::sq_h1(false), ramp) == doctest::Approx(ref * 10.0));
  Signal neg(g, 1.0);
  neg[3] = -0.1;
  CHECK_THROWS_AS(eval_J(Penalty::negentropy(), neg), InvalidArgument);

  // a disc indicator approaches its perimeter
  const Signal disc = disc_2d(Grid::square(256), 0.5, 0.5, 0.25);
  CHECK(eval_J(Penalty::tv(), disc) == doctest::Approx(2.0 * std::numbers::pi * 0.25).epsilon(0.1));
}

TEST_CASE("simple proximal maps") {
  std::mt19937_64 rng(1);
  const Grid g = Grid::line(20);
  const Signal v = random_signal(g, rng);
  CHECK(norm(prox_J(Penalty::sq_l2(), v, 1.0) - 0.5 * v) <= 1e-15);
  for (const auto& p : {Penalty::sq_l2(), Penalty::sq_h1(), Penalty::tv()})
    CHECK(norm(prox_J(p, v, 1e-12) - v) <= 1e-8 * norm(v));
  CHECK_THROWS_AS(prox_J(Penalty::negentropy(), v, 1.0), InvalidArgument);
  CHECK_THROWS_AS(prox_J(Penalty::tv(), v, 0.0), InvalidArgument);
}

TEST_CASE("sq_h1 prox against a dense linear solve") {
  std::mt19937_64 rng(2);
  for (const Grid& g : {Grid::line(8), Grid::line(37), Grid({6, 5})}) {
    for (bool paper : {true, false}) {
      const Penalty p = Penalty::sq_h1(paper);
      const Signal v = random_signal(g, rng);
      const double tau = 0.3;
      const Eigen::MatrixXd L = h1_matrix(g, paper);
      const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(L.rows(), L.cols()) + 2.0 * tau * L;
      const Eigen::VectorXd ref = A.ldlt().solve(oracle::vec(v));
      CHECK((oracle::vec(prox_J(p, v, tau)) - ref).norm() <= 1e-10 * ref.norm());
      // the penalty and its gradient agree with the matrix
      CHECK(eval_J(p, v) == doctest::Approx(g.cell_measure() * oracle::vec(v).dot(L * oracle::vec(v))).epsilon(1e-12));
      CHECK((oracle::vec(gradient_J(p, v)) - 2.0 * L * oracle::vec(v)).norm() <= 1e-10 * (L * oracle::vec(v)).norm());
    }
  }
}

TEST_CASE("prox characterisation by the subgradient inequality") {
  std::mt19937_64 rng(3);
  for (const Grid& g : {Grid::line(64), Grid({16, 12})}) {
    for (const auto& p : {Penalty::sq_l2(), Penalty::sq_h1(), Penalty::sq_h1(true), Penalty::tv()}) {
      for (double tau : {0.01, 0.1, 1.0}) {
        const Signal v = random_signal(g, rng);
        const Signal w = prox_J(p, v, tau);
        const Signal xi = (1.0 / tau) * (v - w);
        double scale = 1.0;
        const double viol = subgradient_violation(p, w, xi, rng, &scale);
        CHECK(viol <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("prox is firmly nonexpansive") {
  std::mt19937_64 rng(4);
  const Grid g({10, 10});
  for (const auto& p : {Penalty::sq_l2(), Penalty::sq_h1(), Penalty::tv()}) {
    for (int t = 0; t < 10; ++t) {
      const Signal a = random_signal(g, rng), b = random_signal(g, rng);
      const Signal pa = prox_J(p, a, 0.2), pb = prox_J(p, b, 0.2);
      CHECK(norm(pa - pb) <= norm(a - b) * (1.0 + 1e-9));
      // the TV prox is inexact at the duality-gap tolerance
      CHECK(inner(pa - pb, a - b) >= std::pow(norm(pa - pb), 2) * (1.0 - 1e-4) - 1e-9);
    }
  }
}

TEST_CASE("TV prox warm start and duality gap") {
  std::mt19937_64 rng(5);
  const Grid g({24, 24});
  const Signal v = random_signal(g, rng);
  const auto cold = prox_tv(Penalty::tv(), v, 0.05);
  CHECK(cold.converged);
  const auto warm = prox_tv(Penalty::tv(), v, 0.05, &cold.dual);
  CHECK(warm.converged);
  CHECK(warm.iterations <= cold.iterations);
  // both iterates lie within sqrt(2 gap) of the exact prox
  CHECK(norm(warm.w - cold.w) <= std::sqrt(2.0 * cold.gap) + std::sqrt(2.0 * warm.gap));
  // 1-D uses the exact direct algorithm
  const Signal v1 = random_signal(Grid::line(300), rng);
  const auto r1 = prox_tv(Penalty::tv(), v1, 0.01);
  CHECK(r1.converged);
  CHECK(r1.gap <= 1e-8 * (1.0 + eval_J(Penalty::tv(), r1.w)));
}

TEST_CASE("Bregman identities") {
  std::mt19937_64 rng(6);
  const Grid g = Grid::line(30);
  const Signal u = random_signal(g, rng), v = random_signal(g, rng);
  CHECK(bregman(Penalty::sq_l2(), v, u).value == doctest::Approx(0.5 * std::pow(norm(v - u), 2)).epsilon(1e-14));
  CHECK(bregman(Penalty::sq_l2(), v, u, u).value == doctest::Approx(0.5 * std::pow(norm(v - u), 2)).epsilon(1e-14));
  for (const auto& p : {Penalty::sq_l2(), Penalty::sq_h1(), Penalty::tv()}) {
    CHECK(std::abs(bregman(p, u, u).value) <= 1e-14);
    CHECK(bregman(p, v, u).value >= -1e-10);
  }
  const Signal one(g, 1.0), two(g, 2.0);
  CHECK(bregman(Penalty::negentropy(), two, one).value == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
  CHECK(bregman(Penalty::negentropy(), two, two).value == doctest::Approx(0.0));
  Signal pos(g);
  for (std::size_t i = 0; i < 30; ++i) pos[i] = 0.1 + std::abs(u[i]);
  CHECK(std::abs(bregman(Penalty::negentropy(), pos, pos).value) <= 1e-14);
  CHECK(bregman(Penalty::negentropy(), pos, one).value >= 0.0);
  CHECK_THROWS_AS(bregman(Penalty::negentropy(), v, one), InvalidArgument);
}

TEST_CASE("TV subgradient witnesses") {
  std::mt19937_64 rng(7);
  const Grid g = Grid::square(128);
  const Signal zero_xi = tv_subgradient_witness(Signal(g, 2.0));
  CHECK(max_abs(zero_xi) == 0.0);

  const Signal disc = disc_2d(g, 0.5, 0.5, 0.25);
  const Signal xi = tv_subgradient_witness(disc, DiscExtension{0.5, 0.5, 0.25, 0.1});
  double scale = 1.0;
  const double viol = subgradient_violation(Penalty::tv(), disc, xi, rng, &scale);
  CHECK(viol <= 1e-6 * scale);
  const double J = eval_J(Penalty::tv(), disc);
  CHECK(std::abs(inner(xi, disc) - J) <= 0.05 * J);
  CHECK(std::abs(bregman(Penalty::tv(), disc, disc, xi).value) <= 1e-10);

  // smooth bump without extension
  Signal bump(g);
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j)
      bump.at(i, j) = std::exp(-(std::pow(g.center(0, i) - 0.4, 2) + std::pow(g.center(1, j) - 0.6, 2)) / 0.02);
  const Signal xb = tv_subgradient_witness(bump);
  CHECK(subgradient_violation(Penalty::tv(), bump, xb, rng, &scale) <= 1e-6 * scale);
  CHECK(inner(xb, bump) == doctest::Approx(eval_J(Penalty::tv(), bump)).epsilon(1e-10));
  CHECK_THROWS_AS(tv_subgradient_witness(Signal(Grid::line(8)), DiscExtension{}), InvalidArgument);
}

TEST_CASE("sq_h1 witness is the Neumann Laplacian") {
  std::mt19937_64 rng(8);
  const Grid g({12, 9});
  const Signal u = random_signal(g, rng);
  const Signal xi = gradient_J(Penalty::sq_h1(), u);
  double scale = 1.0;
  CHECK(subgradient_violation(Penalty::sq_h1(), u, xi, rng, &scale) <= 1e-9 * scale);
  CHECK(inner(xi, Signal(g, 1.0)) == doctest::Approx(0.0).epsilon(1e-12));
}
