#include "smre/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smre/error.hpp"
#include "smre/kernels.hpp"

namespace smre {

Grid::Grid(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  require(dims_.size() == 1 || dims_.size() == 2, "Grid: only 1-D and 2-D grids are supported");
  size_ = 1;
  for (auto d : dims_) {
    require(d > 0, "Grid: dimensions must be positive");
    size_ *= d;
  }
}

Signal::Signal(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

Signal::Signal(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "Signal: value count does not match grid size");
  require(all_finite(), "Signal: values must be finite");
}

Signal& Signal::operator+=(const Signal& o) {
  require_same_grid(*this, o, "Signal::operator+=");
  kernels::axpy(1.0, o.values(), values());
  return *this;
}

Signal& Signal::operator-=(const Signal& o) {
  require_same_grid(*this, o, "Signal::operator-=");
  kernels::axpy(-1.0, o.values(), values());
  return *this;
}

Signal& Signal::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

bool Signal::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(double s, Signal a) { return a *= s; }

void require_same_grid(const Signal& a, const Signal& b, const char* what) {
  if (!(a.grid() == b.grid())) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

double inner(const Signal& a, const Signal& b) {
  require_same_grid(a, b, "inner");
  return a.grid().cell_measure() * kernels::dot(a.values(), b.values());
}

double norm(const Signal& a) { return std::sqrt(inner(a, a)); }

double mean(const Signal& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return s / static_cast<double>(a.size());
}

double max_abs(const Signal& a) { return kernels::max_abs(a.values()).value; }

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ counter);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u1 = counter_uniform(seed, stream, 2 * counter);
  const double u2 = counter_uniform(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Signal draw_white_noise(const Grid& grid, const NoiseModel& model, std::uint64_t replicate) {
  Signal eps(grid);
  const double scale = 1.0 / std::sqrt(grid.cell_measure());
  auto v = eps.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * counter_normal(model.seed, replicate, i);
  return eps;
}

}  // namespace smre
