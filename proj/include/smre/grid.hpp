#pragma once

// Regular 1-D / 2-D grids on the unit cube and grid functions over them.
//
// Every cell carries measure h = 1/#cells, so the discrete inner product
// inner(a, b) = h * sum_i a_i b_i reproduces continuum L2 quantities: the
// constant one function has unit norm and the indicator of a cell set S has
// squared norm |S| * h, the Lebesgue measure of the corresponding cube.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace smre {

class Grid {
 public:
  Grid() = default;
  /// dims has length 1 or 2, all entries positive. 2-D cells are row-major.
  explicit Grid(std::vector<std::size_t> dims);

  static Grid line(std::size_t n) { return Grid({n}); }
  static Grid square(std::size_t n) { return Grid({n, n}); }

  std::size_t dim() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t extent(std::size_t axis) const { return dims_[axis]; }
  std::size_t size() const { return size_; }
  /// Per-cell measure h.
  double cell_measure() const { return 1.0 / static_cast<double>(size_); }
  /// Side length of a cell along `axis` (1 / dims[axis]).
  double cell_width(std::size_t axis) const { return 1.0 / static_cast<double>(dims_[axis]); }

  /// Cell-centre coordinate along `axis` of the cell with that axis index.
  double center(std::size_t axis, std::size_t i) const {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(dims_[axis]);
  }
  std::size_t index(std::size_t i0, std::size_t i1) const { return i0 * dims_[1] + i1; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<std::size_t> dims_{1};
  std::size_t size_ = 1;
};

/// Real-valued grid function.
class Signal {
 public:
  Signal() = default;
  explicit Signal(Grid grid, double fill = 0.0);
  Signal(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t i0, std::size_t i1) { return values_[grid_.index(i0, i1)]; }
  double at(std::size_t i0, std::size_t i1) const { return values_[grid_.index(i0, i1)]; }

  Signal& operator+=(const Signal& o);
  Signal& operator-=(const Signal& o);
  Signal& operator*=(double s);

  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_ = std::vector<double>(1, 0.0);
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(double s, Signal a);

/// Throws InvalidArgument unless both signals live on the same grid.
void require_same_grid(const Signal& a, const Signal& b, const char* what);

/// h * sum_i a_i b_i.
double inner(const Signal& a, const Signal& b);
double norm(const Signal& a);
/// Average value (equals inner(a, 1) on the unit cube).
double mean(const Signal& a);
double max_abs(const Signal& a);

struct NoiseModel {
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Discretised Gaussian white noise: i.i.d. N(0, 1/h) per cell, so that
/// inner(eps, v) ~ N(0, |v|^2) for every grid function v.
///
/// The normal for cell i of replicate r is a pure function of
/// (seed, replicate, i), so replicates may be drawn concurrently and in any
/// order with identical results. NoiseModel::sigma is not applied here.
Signal draw_white_noise(const Grid& grid, const NoiseModel& model, std::uint64_t replicate = 0);

/// Standard normal for a given (seed, stream, counter) triple.
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
/// Uniform in (0, 1) for a given (seed, stream, counter) triple.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

}  // namespace smre
