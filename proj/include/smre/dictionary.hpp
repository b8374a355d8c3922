#pragma once

// Atom systems tested by multiresolution statistics.
//
// An atom phi_n is stored through its unit-norm dual phi_n* = phi_n / |phi_n|
// together with the scale |phi_n| in (0, 1]. Indicator atoms (intervals,
// dyadic cubes, arbitrary cell sets) keep only their support; basis atoms keep
// a dense dual vector.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smre/grid.hpp"

namespace smre {

enum class DictionaryKind { intervals, dyadic, trigonometric, custom };

std::string to_string(DictionaryKind kind);

/// Axis-aligned block of cells, half-open on each axis. 1-D boxes use axis 0
/// only, with lo[1] = 0 and hi[1] = 1.
struct Box {
  std::array<std::size_t, 2> lo{0, 0};
  std::array<std::size_t, 2> hi{1, 1};
  std::size_t cell_count() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]); }
};

using CellSet = std::vector<std::size_t>;
using DenseDual = std::vector<double>;

struct Atom {
  std::variant<Box, CellSet, DenseDual> shape;
  double norm = 1.0;  // |phi_n|
};

/// One level of a dyadic partition system.
struct DyadicLevel {
  int level = 0;
  std::size_t first_atom = 0;
  std::size_t count = 0;  // 2^(l d)
  double scale = 1.0;     // eps_l = 2^(-l d / 2), the atom norm on this level
  double diameter = 1.0;  // delta_l = 2^(-l) sqrt(d)
};

struct DictionaryMeta {
  std::size_t min_len = 0;  // intervals
  std::size_t max_len = 0;  // intervals
  int max_level = -1;       // dyadic
  std::size_t basis_count = 0;  // trigonometric
  std::vector<DyadicLevel> levels;
};

class Dictionary {
 public:
  Dictionary(Grid grid, DictionaryKind kind, std::vector<Atom> atoms, DictionaryMeta meta = {});

  const Grid& grid() const { return grid_; }
  DictionaryKind kind() const { return kind_; }
  std::size_t size() const { return atoms_.size(); }
  const Atom& atom(std::size_t n) const { return atoms_.at(n); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const DictionaryMeta& meta() const { return meta_; }
  double atom_norm(std::size_t n) const { return atoms_[n].norm; }

  /// phi_n* as a dense grid function.
  Signal dual(std::size_t n) const;

  /// <x, phi_n*> by direct summation over the atom support.
  double coeff_direct(std::size_t n, std::span<const double> x) const;
  /// x += c * phi_n*.
  void add_dual(std::size_t n, double c, std::span<double> x) const;

 private:
  Grid grid_;
  DictionaryKind kind_;
  std::vector<Atom> atoms_;
  DictionaryMeta meta_;
};

/// Indicators of all intervals {i, ..., i + len - 1} with min_len <= len <= max_len,
/// ordered by (length, start). The atom count is sum_{len} (n - len + 1).
Dictionary build_intervals(const Grid& grid, std::size_t max_len, std::size_t min_len = 1);

/// Indicators of every dyadic cube of levels 0..max_level, ordered by
/// (level, row-major cube index). Level l contributes 2^(l d) cubes.
Dictionary build_dyadic(const Grid& grid, int max_level);

/// First `count` functions of {1, sqrt2 cos(2 pi k x), sqrt2 sin(2 pi k x)}_{k >= 1}
/// sampled at the periodic nodes x_i = i / n and normalised to unit grid norm.
/// For even n the Nyquist term k = n/2 contributes its cosine only.
Dictionary build_trigonometric(const Grid& grid, std::size_t count);

/// Dense atoms phi_n given directly; each must satisfy 0 < |phi_n| <= 1.
Dictionary build_custom(const Grid& grid, const std::vector<Signal>& atoms);

/// Indicators of arbitrary non-empty cell sets.
Dictionary build_indicator_sets(const Grid& grid, std::vector<CellSet> sets);

/// <v, phi_n*>. Indicator atoms go through a summed-area table of v.
double project_coeff(const Dictionary& dict, std::size_t n, const Signal& v);

/// Batch coefficient evaluation for one dictionary. load() builds prefix sums
/// (1-D) or a summed-area table (2-D) of the signal in O(#cells); afterwards
/// every indicator coefficient costs O(1).
class Projector {
 public:
  explicit Projector(const Dictionary& dict);

  void load(const Signal& v);
  void load(std::span<const double> v);
  double coeff(std::size_t n) const;
  /// All coefficients in atom order; out.size() == dict.size().
  void all(std::span<double> out) const;
  std::vector<double> all() const;

  const Dictionary& dictionary() const { return *dict_; }

 private:
  double box_sum(const Box& b) const;

  const Dictionary* dict_;
  std::span<const double> values_;
  std::vector<double> sat_;  // (n0 + 1) x (n1 + 1), or n + 1 in 1-D
  std::size_t stride_ = 1;
};

}  // namespace smre
