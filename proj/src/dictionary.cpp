#include "smre/dictionary.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "smre/error.hpp"
#include "smre/kernels.hpp"

namespace smre {

std::string to_string(DictionaryKind kind) {
  switch (kind) {
    case DictionaryKind::intervals: return "intervals";
    case DictionaryKind::dyadic: return "dyadic";
    case DictionaryKind::trigonometric: return "trigonometric";
    case DictionaryKind::custom: return "custom";
  }
  return "unknown";
}

Dictionary::Dictionary(Grid grid, DictionaryKind kind, std::vector<Atom> atoms, DictionaryMeta meta)
    : grid_(std::move(grid)), kind_(kind), atoms_(std::move(atoms)), meta_(std::move(meta)) {
  require(!atoms_.empty(), "Dictionary: must contain at least one atom");
  for (const auto& a : atoms_) {
    require(a.norm > 0.0 && a.norm <= 1.0 + 1e-12, "Dictionary: atom norms must lie in (0, 1]");
  }
}

namespace {

// Value of phi* on every cell of an indicator atom with `cells` cells.
double indicator_dual_value(const Grid& g, std::size_t cells) {
  return 1.0 / std::sqrt(static_cast<double>(cells) * g.cell_measure());
}

template <class F>
void for_each_box_cell(const Grid& g, const Box& b, F&& f) {
  if (g.dim() == 1) {
    for (std::size_t i = b.lo[0]; i < b.hi[0]; ++i) f(i);
  } else {
    for (std::size_t i = b.lo[0]; i < b.hi[0]; ++i)
      for (std::size_t j = b.lo[1]; j < b.hi[1]; ++j) f(g.index(i, j));
  }
}

}  // namespace

Signal Dictionary::dual(std::size_t n) const {
  const Atom& a = atoms_.at(n);
  Signal s(grid_);
  auto v = s.values();
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Box>) {
          const double val = indicator_dual_value(grid_, shape.cell_count());
          for_each_box_cell(grid_, shape, [&](std::size_t i) { v[i] = val; });
        } else if constexpr (std::is_same_v<T, CellSet>) {
          const double val = indicator_dual_value(grid_, shape.size());
          for (auto i : shape) v[i] = val;
        } else {
          std::copy(shape.begin(), shape.end(), v.begin());
        }
      },
      a.shape);
  return s;
}

double Dictionary::coeff_direct(std::size_t n, std::span<const double> x) const {
  const Atom& a = atoms_[n];
  const double h = grid_.cell_measure();
  return std::visit(
      [&](const auto& shape) -> double {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Box>) {
          double s = 0.0;
          for_each_box_cell(grid_, shape, [&](std::size_t i) { s += x[i]; });
          return std::sqrt(h / static_cast<double>(shape.cell_count())) * s;
        } else if constexpr (std::is_same_v<T, CellSet>) {
          double s = 0.0;
          for (auto i : shape) s += x[i];
          return std::sqrt(h / static_cast<double>(shape.size())) * s;
        } else {
          return h * kernels::dot(x, shape);
        }
      },
      a.shape);
}

void Dictionary::add_dual(std::size_t n, double c, std::span<double> x) const {
  const Atom& a = atoms_[n];
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Box>) {
          const double val = c * indicator_dual_value(grid_, shape.cell_count());
          for_each_box_cell(grid_, shape, [&](std::size_t i) { x[i] += val; });
        } else if constexpr (std::is_same_v<T, CellSet>) {
          const double val = c * indicator_dual_value(grid_, shape.size());
          for (auto i : shape) x[i] += val;
        } else {
          kernels::axpy(c, shape, x);
        }
      },
      a.shape);
}

Dictionary build_intervals(const Grid& grid, std::size_t max_len, std::size_t min_len) {
  require(grid.dim() == 1, "build_intervals: grid must be 1-D");
  require(min_len >= 1, "build_intervals: lengths must be at least 1");
  require(max_len >= min_len, "build_intervals: max_len must be >= min_len");
  const std::size_t n = grid.size();
  require(max_len <= n, "build_intervals: max_len exceeds grid size");
  std::vector<Atom> atoms;
  std::size_t count = 0;
  for (std::size_t len = min_len; len <= max_len; ++len) count += n - len + 1;
  atoms.reserve(count);
  const double h = grid.cell_measure();
  for (std::size_t len = min_len; len <= max_len; ++len) {
    const double nrm = std::sqrt(static_cast<double>(len) * h);
    for (std::size_t start = 0; start + len <= n; ++start) {
      atoms.push_back({Box{{start, 0}, {start + len, 1}}, nrm});
    }
  }
  DictionaryMeta meta;
  meta.min_len = min_len;
  meta.max_len = max_len;
  return Dictionary(grid, DictionaryKind::intervals, std::move(atoms), std::move(meta));
}

Dictionary build_dyadic(const Grid& grid, int max_level) {
  require(max_level >= 0, "build_dyadic: max_level must be non-negative");
  require(max_level < 31, "build_dyadic: max_level too large");
  const std::size_t side = std::size_t{1} << max_level;
  for (auto d : grid.dims()) {
    require(d % side == 0, "build_dyadic: grid dims must be divisible by 2^max_level");
  }
  const std::size_t d = grid.dim();
  const double h = grid.cell_measure();
  std::vector<Atom> atoms;
  DictionaryMeta meta;
  meta.max_level = max_level;
  for (int l = 0; l <= max_level; ++l) {
    const std::size_t parts = std::size_t{1} << l;
    DyadicLevel info;
    info.level = l;
    info.first_atom = atoms.size();
    info.scale = std::pow(2.0, -0.5 * static_cast<double>(l) * static_cast<double>(d));
    info.diameter = std::pow(2.0, -static_cast<double>(l)) * std::sqrt(static_cast<double>(d));
    const std::size_t w0 = grid.extent(0) / parts;
    if (d == 1) {
      for (std::size_t j = 0; j < parts; ++j) {
        Box b{{j * w0, 0}, {(j + 1) * w0, 1}};
        atoms.push_back({b, std::sqrt(static_cast<double>(b.cell_count()) * h)});
      }
    } else {
      const std::size_t w1 = grid.extent(1) / parts;
      for (std::size_t r = 0; r < parts; ++r) {
        for (std::size_t c = 0; c < parts; ++c) {
          Box b{{r * w0, c * w1}, {(r + 1) * w0, (c + 1) * w1}};
          atoms.push_back({b, std::sqrt(static_cast<double>(b.cell_count()) * h)});
        }
      }
    }
    info.count = atoms.size() - info.first_atom;
    meta.levels.push_back(info);
  }
  return Dictionary(grid, DictionaryKind::dyadic, std::move(atoms), std::move(meta));
}

Dictionary build_trigonometric(const Grid& grid, std::size_t count) {
  require(grid.dim() == 1, "build_trigonometric: grid must be 1-D");
  const std::size_t n = grid.size();
  require(count >= 1, "build_trigonometric: count must be positive");
  require(count <= n, "build_trigonometric: count exceeds grid size");
  const double h = grid.cell_measure();
  std::vector<Atom> atoms;
  atoms.reserve(count);
  auto push_normalised = [&](DenseDual v) {
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double nrm = std::sqrt(h * ss);
    for (double& x : v) x /= nrm;
    atoms.push_back({std::move(v), 1.0});
  };
  push_normalised(DenseDual(n, 1.0));
  for (std::size_t k = 1; atoms.size() < count; ++k) {
    const bool nyquist = 2 * k == n;
    DenseDual c(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Reduce the phase modulo n in integers so large k*i stays exact.
      const double phase =
          2.0 * std::numbers::pi * static_cast<double>((k * i) % n) / static_cast<double>(n);
      c[i] = std::numbers::sqrt2 * std::cos(phase);
      s[i] = std::numbers::sqrt2 * std::sin(phase);
    }
    push_normalised(std::move(c));
    if (atoms.size() < count && !nyquist) push_normalised(std::move(s));
  }
  DictionaryMeta meta;
  meta.basis_count = count;
  return Dictionary(grid, DictionaryKind::trigonometric, std::move(atoms), std::move(meta));
}

Dictionary build_custom(const Grid& grid, const std::vector<Signal>& atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    require(a.grid() == grid, "build_custom: atom grid mismatch");
    const double nrm = norm(a);
    require(nrm > 0.0, "build_custom: zero atom");
    require(nrm <= 1.0 + 1e-12, "build_custom: atom norm exceeds 1");
    DenseDual dual(a.values().begin(), a.values().end());
    for (double& x : dual) x /= nrm;
    out.push_back({std::move(dual), std::min(nrm, 1.0)});
  }
  return Dictionary(grid, DictionaryKind::custom, std::move(out));
}

Dictionary build_indicator_sets(const Grid& grid, std::vector<CellSet> sets) {
  std::vector<Atom> out;
  out.reserve(sets.size());
  const double h = grid.cell_measure();
  for (auto& s : sets) {
    require(!s.empty(), "build_indicator_sets: empty cell set");
    for (auto i : s) require(i < grid.size(), "build_indicator_sets: cell index out of range");
    const double nrm = std::sqrt(static_cast<double>(s.size()) * h);
    out.push_back({std::move(s), std::min(nrm, 1.0)});
  }
  return Dictionary(grid, DictionaryKind::custom, std::move(out));
}

double project_coeff(const Dictionary& dict, std::size_t n, const Signal& v) {
  require(n < dict.size(), "project_coeff: atom index out of range");
  require(v.grid() == dict.grid(), "project_coeff: grid mismatch");
  if (std::holds_alternative<Box>(dict.atom(n).shape)) {
    Projector p(dict);
    p.load(v);
    return p.coeff(n);
  }
  return dict.coeff_direct(n, v.values());
}

Projector::Projector(const Dictionary& dict) : dict_(&dict) {
  const auto& g = dict.grid();
  if (g.dim() == 1) {
    sat_.assign(g.size() + 1, 0.0);
    stride_ = 1;
  } else {
    stride_ = g.extent(1) + 1;
    sat_.assign((g.extent(0) + 1) * stride_, 0.0);
  }
}

void Projector::load(const Signal& v) {
  require(v.grid() == dict_->grid(), "Projector::load: grid mismatch");
  load(v.values());
}

void Projector::load(std::span<const double> v) {
  const auto& g = dict_->grid();
  values_ = v;
  if (g.dim() == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += v[i];
      sat_[i + 1] = s;
    }
  } else {
    const std::size_t n0 = g.extent(0), n1 = g.extent(1);
    for (std::size_t i = 0; i < n0; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n1; ++j) {
        row += v[i * n1 + j];
        sat_[(i + 1) * stride_ + j + 1] = sat_[i * stride_ + j + 1] + row;
      }
    }
  }
}

double Projector::box_sum(const Box& b) const {
  if (dict_->grid().dim() == 1) return sat_[b.hi[0]] - sat_[b.lo[0]];
  return sat_[b.hi[0] * stride_ + b.hi[1]] - sat_[b.lo[0] * stride_ + b.hi[1]] -
         sat_[b.hi[0] * stride_ + b.lo[1]] + sat_[b.lo[0] * stride_ + b.lo[1]];
}

double Projector::coeff(std::size_t n) const {
  const Atom& a = dict_->atom(n);
  if (const auto* b = std::get_if<Box>(&a.shape)) {
    const double h = dict_->grid().cell_measure();
    return std::sqrt(h / static_cast<double>(b->cell_count())) * box_sum(*b);
  }
  return dict_->coeff_direct(n, values_);
}

void Projector::all(std::span<double> out) const {
  require(out.size() == dict_->size(), "Projector::all: output size mismatch");
  const auto& meta = dict_->meta();
  const double h = dict_->grid().cell_measure();
  if (dict_->kind() == DictionaryKind::intervals) {
    const std::size_t n = dict_->grid().size();
    std::size_t offset = 0;
    for (std::size_t len = meta.min_len; len <= meta.max_len; ++len) {
      const std::size_t count = n - len + 1;
      kernels::window_diff(sat_, len, std::sqrt(h / static_cast<double>(len)),
                           out.subspan(offset, count));
      offset += count;
    }
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeff(i);
}

std::vector<double> Projector::all() const {
  std::vector<double> out(dict_->size());
  all(out);
  return out;
}

}  // namespace smre
