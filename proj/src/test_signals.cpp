#include "smre/test_signals.hpp"

#include <cmath>
#include <numbers>

#include "smre/error.hpp"

namespace smre {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

template <class F>
Signal sample(const Grid& grid, F&& f) {
  Signal s(grid);
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = f(grid.center(0, i), 0.0);
  } else {
    for (std::size_t i = 0; i < grid.extent(0); ++i)
      for (std::size_t j = 0; j < grid.extent(1); ++j) s.at(i, j) = f(grid.center(0, i), grid.center(1, j));
  }
  return s;
}

}  // namespace

Signal bumps_kinks_jumps(const Grid& grid) {
  require(grid.dim() == 1, "bumps_kinks_jumps: 1-D grid required");
  return sample(grid, [](double x, double) {
    double v = 0.0;
    if (x >= 0.2 && x < 0.45) {
      v = 1.0;
    } else if (x >= 0.45 && x < 0.8) {
      v = 1.0 - 2.0 * (x - 0.45);
    } else if (x >= 0.8) {
      v = 0.3 + 0.3 * std::sin(8.0 * std::numbers::pi * (x - 0.8));
    }
    const double z = (x - 0.65) / 0.01;
    return v + std::exp(-0.5 * z * z);
  });
}

Signal step(const Grid& grid, double at, double height) {
  return sample(grid, [=](double x, double) { return x >= at ? height : 0.0; });
}

Signal disc_2d(const Grid& grid, double cx, double cy, double radius) {
  require(grid.dim() == 2, "disc_2d: 2-D grid required");
  require(radius > 0.0, "disc_2d: radius must be positive");
  return sample(grid, [=](double x, double y) {
    return std::hypot(x - cx, y - cy) <= radius ? 1.0 : 0.0;
  });
}

Signal hoelder_beta(const Grid& grid, double beta) {
  require(beta > 0.0, "hoelder_beta: beta must be positive");
  if (grid.dim() == 1) return sample(grid, [=](double x, double) { return std::pow(x, beta); });
  return sample(grid, [=](double x, double y) { return std::pow(std::hypot(x, y) / std::numbers::sqrt2, beta); });
}

Signal make_test_signal(const std::string& name, const Grid& grid, const std::map<std::string, double>& params) {
  if (name == "bumps_kinks_jumps") return bumps_kinks_jumps(grid);
  if (name == "step") return step(grid, param(params, "at", 0.5), param(params, "height", 1.0));
  if (name == "disc_2d")
    return disc_2d(grid, param(params, "cx", 0.5), param(params, "cy", 0.5), param(params, "radius", 0.25));
  if (name == "hoelder_beta") return hoelder_beta(grid, param(params, "beta", 0.5));
  if (name == "linear") return hoelder_beta(grid, 1.0);
  if (name == "constant") return Signal(grid, param(params, "value", 1.0));
  throw InvalidArgument("unknown test signal '" + name + "'");
}

}  // namespace smre
