#include "smre/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "smre/error.hpp"
#include "smre/kernels.hpp"

namespace smre {

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::identity: return "identity";
    case OperatorKind::diagonal_svd: return "diagonal_svd";
    case OperatorKind::convolution: return "convolution";
  }
  return "unknown";
}

Signal make_kernel(const Grid& grid, const std::string& shape, double width) {
  Signal k(grid);
  const std::size_t d = grid.dim();
  std::array<std::size_t, 2> n{grid.extent(0), d == 2 ? grid.extent(1) : 1};
  std::array<std::size_t, 2> c{n[0] / 2, n[1] / 2};
  auto offset = [&](std::size_t axis, std::size_t i) {
    return (static_cast<double>(i) - static_cast<double>(c[axis])) / static_cast<double>(n[axis]);
  };
  if (shape == "delta") {
    k.values()[c[0] * n[1] + c[1]] = 1.0;
    return k;
  }
  require(width > 0.0, "make_kernel: width must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < n[0]; ++i) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      const double x = offset(0, i);
      const double y = d == 2 ? offset(1, j) : 0.0;
      double w = 0.0;
      if (shape == "gaussian") {
        const double r2 = x * x + y * y;
        if (r2 <= 16.0 * width * width) w = std::exp(-0.5 * r2 / (width * width));
      } else if (shape == "box") {
        const double half = 0.5 * width + 1e-12;
        if (std::abs(x) <= half && std::abs(y) <= half) w = 1.0;
      } else {
        throw InvalidArgument("make_kernel: unknown kernel shape '" + shape + "'");
      }
      k.values()[i * n[1] + j] = w;
      total += w;
    }
  }
  if (total <= 0.0) {
    // Narrower than one cell: collapses to the delta kernel.
    k.values()[c[0] * n[1] + c[1]] = 1.0;
    return k;
  }
  k *= 1.0 / total;
  return k;
}

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwFree>;
using CplxBuf = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuf alloc_real(std::size_t n) { return RealBuf(fftw_alloc_real(n)); }
CplxBuf alloc_cplx(std::size_t n) { return CplxBuf(fftw_alloc_complex(n)); }

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct ForwardOperator::Impl {
  OperatorKind kind = OperatorKind::identity;
  Grid grid;
  Boundary boundary = Boundary::periodic;

  // diagonal_svd
  std::shared_ptr<const Dictionary> basis;
  std::vector<double> s;

  // convolution on the working (possibly doubled) grid
  std::array<std::size_t, 2> n{1, 1};  // original extents
  std::array<std::size_t, 2> w{1, 1};  // working extents
  std::size_t work_size = 1;
  std::size_t spec_size = 1;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Impl() = default;
  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  void make_plans(std::size_t dim) {
    auto in = alloc_real(work_size);
    auto out = alloc_cplx(spec_size);
    std::lock_guard lock(planner_mutex());
    if (dim == 1) {
      forward = fftw_plan_dft_r2c_1d(static_cast<int>(w[0]), in.get(), out.get(), FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(static_cast<int>(w[0]), out.get(), in.get(), FFTW_ESTIMATE);
    } else {
      forward = fftw_plan_dft_r2c_2d(static_cast<int>(w[0]), static_cast<int>(w[1]), in.get(),
                                     out.get(), FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_2d(static_cast<int>(w[0]), static_cast<int>(w[1]), out.get(),
                                      in.get(), FFTW_ESTIMATE);
    }
    if (!forward || !backward) throw InvalidArgument("convolution: FFT planning failed");
  }

  // Copies x (original grid) into the working buffer, zero-extending in padded mode.
  void embed(std::span<const double> x, double* buf) const {
    std::fill(buf, buf + work_size, 0.0);
    for (std::size_t i = 0; i < n[0]; ++i)
      for (std::size_t j = 0; j < n[1]; ++j) buf[i * w[1] + j] = x[i * n[1] + j];
  }
  void restrict_to(const double* buf, std::span<double> y) const {
    for (std::size_t i = 0; i < n[0]; ++i)
      for (std::size_t j = 0; j < n[1]; ++j) y[i * n[1] + j] = buf[i * w[1] + j];
  }

  // y = restrict(C embed(x)) where C multiplies the spectrum by kernel_hat
  // (or its conjugate).
  void convolve(std::span<const double> x, std::span<double> y, bool conjugate) const {
    auto buf = alloc_real(work_size);
    auto spec = alloc_cplx(spec_size);
    embed(x, buf.get());
    fftw_execute_dft_r2c(forward, buf.get(), spec.get());
    const double scale = 1.0 / static_cast<double>(work_size);
    for (std::size_t k = 0; k < spec_size; ++k) {
      std::complex<double> z(spec[k][0], spec[k][1]);
      z *= conjugate ? std::conj(kernel_hat[k]) : kernel_hat[k];
      spec[k][0] = z.real() * scale;
      spec[k][1] = z.imag() * scale;
    }
    fftw_execute_dft_c2r(backward, spec.get(), buf.get());
    restrict_to(buf.get(), y);
  }

  void spectral_solve(double rho, std::span<const double> b, std::span<double> u) const {
    auto buf = alloc_real(work_size);
    auto spec = alloc_cplx(spec_size);
    embed(b, buf.get());
    fftw_execute_dft_r2c(forward, buf.get(), spec.get());
    const double scale = 1.0 / static_cast<double>(work_size);
    for (std::size_t k = 0; k < spec_size; ++k) {
      const double m = scale / (1.0 + rho * std::norm(kernel_hat[k]));
      spec[k][0] *= m;
      spec[k][1] *= m;
    }
    fftw_execute_dft_c2r(backward, spec.get(), buf.get());
    restrict_to(buf.get(), u);
  }

  std::vector<double> analysis(std::span<const double> u) const {
    std::vector<double> c(basis->size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = basis->coeff_direct(k, u);
    return c;
  }
  void synthesis(const std::vector<double>& c, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] != 0.0) basis->add_dual(k, c[k], out);
  }
};

ForwardOperator ForwardOperator::identity(const Grid& grid) {
  auto impl = std::make_shared<Impl>();
  impl->kind = OperatorKind::identity;
  impl->grid = grid;
  return ForwardOperator(std::move(impl));
}

ForwardOperator ForwardOperator::diagonal_svd(std::shared_ptr<const Dictionary> basis,
                                              std::vector<double> singular_values) {
  require(basis != nullptr, "diagonal_svd: basis required");
  require(singular_values.size() == basis->size(),
          "diagonal_svd: one singular value per basis function required");
  for (double v : singular_values)
    require(v > 0.0 && std::isfinite(v), "diagonal_svd: singular values must be positive");
  for (std::size_t k = 0; k < basis->size(); ++k)
    require(std::abs(basis->atom_norm(k) - 1.0) < 1e-12 ||
                basis->kind() == DictionaryKind::trigonometric,
            "diagonal_svd: basis atoms must have unit norm");
  auto impl = std::make_shared<Impl>();
  impl->kind = OperatorKind::diagonal_svd;
  impl->grid = basis->grid();
  impl->basis = std::move(basis);
  impl->s = std::move(singular_values);
  return ForwardOperator(std::move(impl));
}

ForwardOperator ForwardOperator::diagonal_svd(const Grid& grid, std::vector<double> singular_values) {
  auto basis = std::make_shared<const Dictionary>(build_trigonometric(grid, singular_values.size()));
  return diagonal_svd(std::move(basis), std::move(singular_values));
}

ForwardOperator ForwardOperator::convolution(const Signal& kernel, Boundary boundary) {
  require(kernel.all_finite(), "convolution: kernel must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = OperatorKind::convolution;
  impl->grid = kernel.grid();
  impl->boundary = boundary;
  const Grid& g = kernel.grid();
  const std::size_t d = g.dim();
  impl->n = {g.extent(0), d == 2 ? g.extent(1) : 1};
  const std::size_t f = boundary == Boundary::zero_padded ? 2 : 1;
  impl->w = {impl->n[0] * f, d == 2 ? impl->n[1] * f : 1};
  impl->work_size = impl->w[0] * impl->w[1];
  impl->spec_size = d == 1 ? impl->w[0] / 2 + 1 : impl->w[0] * (impl->w[1] / 2 + 1);
  impl->make_plans(d);

  // Place the kernel with its centre cell at the origin of the working grid.
  auto buf = alloc_real(impl->work_size);
  auto spec = alloc_cplx(impl->spec_size);
  std::fill(buf.get(), buf.get() + impl->work_size, 0.0);
  const std::array<std::size_t, 2> c{impl->n[0] / 2, impl->n[1] / 2};
  for (std::size_t i = 0; i < impl->n[0]; ++i) {
    for (std::size_t j = 0; j < impl->n[1]; ++j) {
      const std::size_t ii = (i + impl->w[0] - c[0]) % impl->w[0];
      const std::size_t jj = (j + impl->w[1] - c[1]) % impl->w[1];
      buf[ii * impl->w[1] + jj] += kernel.values()[i * impl->n[1] + j];
    }
  }
  fftw_execute_dft_r2c(impl->forward, buf.get(), spec.get());
  impl->kernel_hat.resize(impl->spec_size);
  for (std::size_t k = 0; k < impl->spec_size; ++k) impl->kernel_hat[k] = {spec[k][0], spec[k][1]};
  return ForwardOperator(std::move(impl));
}

OperatorKind ForwardOperator::kind() const { return impl_->kind; }
const Grid& ForwardOperator::grid() const { return impl_->grid; }
Boundary ForwardOperator::boundary() const { return impl_->boundary; }

Signal ForwardOperator::apply(const Signal& u) const {
  require(u.grid() == impl_->grid, "ForwardOperator::apply: grid mismatch");
  switch (impl_->kind) {
    case OperatorKind::identity: return u;
    case OperatorKind::diagonal_svd: {
      auto c = impl_->analysis(u.values());
      for (std::size_t k = 0; k < c.size(); ++k) c[k] *= impl_->s[k];
      Signal out(impl_->grid);
      impl_->synthesis(c, out.values());
      return out;
    }
    case OperatorKind::convolution: {
      Signal out(impl_->grid);
      impl_->convolve(u.values(), out.values(), false);
      return out;
    }
  }
  return u;
}

Signal ForwardOperator::adjoint(const Signal& v) const {
  require(v.grid() == impl_->grid, "ForwardOperator::adjoint: grid mismatch");
  if (impl_->kind == OperatorKind::convolution) {
    Signal out(impl_->grid);
    impl_->convolve(v.values(), out.values(), true);
    return out;
  }
  return apply(v);  // identity and diagonal_svd are self-adjoint
}

Signal ForwardOperator::solve_regularized_normal(double rho, const Signal& b) const {
  require(rho > 0.0, "solve_regularized_normal: rho must be positive");
  require(b.grid() == impl_->grid, "solve_regularized_normal: grid mismatch");
  switch (impl_->kind) {
    case OperatorKind::identity: return (1.0 / (1.0 + rho)) * b;
    case OperatorKind::diagonal_svd: {
      auto c = impl_->analysis(b.values());
      for (std::size_t k = 0; k < c.size(); ++k)
        c[k] *= 1.0 / (1.0 + rho * impl_->s[k] * impl_->s[k]) - 1.0;
      Signal corr(impl_->grid);
      impl_->synthesis(c, corr.values());
      return b + corr;
    }
    case OperatorKind::convolution: {
      Signal u(impl_->grid);
      if (impl_->boundary == Boundary::periodic) {
        impl_->spectral_solve(rho, b.values(), u.values());
        return u;
      }
      // Zero-padded: the periodic solve on the original grid is a good warm start.
      impl_->spectral_solve(rho, b.values(), u.values());
      std::vector<double> tmp(b.size());
      auto A = [&](std::span<const double> x, std::span<double> y) {
        impl_->convolve(x, tmp, false);
        impl_->convolve(tmp, y, true);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + rho * y[i];
      };
      conjugate_gradient(A, b.values(), u.values(), 1e-12, 10 * b.size() + 100);
      return u;
    }
  }
  return b;
}

double ForwardOperator::norm_bound() const {
  switch (impl_->kind) {
    case OperatorKind::identity: return 1.0;
    case OperatorKind::diagonal_svd: return *std::max_element(impl_->s.begin(), impl_->s.end());
    case OperatorKind::convolution: {
      double m = 0.0;
      for (const auto& z : impl_->kernel_hat) m = std::max(m, std::abs(z));
      return m;
    }
  }
  return 1.0;
}

std::vector<double> ForwardOperator::analysis(const Signal& u) const {
  require(impl_->kind == OperatorKind::diagonal_svd, "analysis: diagonal_svd operators only");
  return impl_->analysis(u.values());
}

Signal ForwardOperator::synthesis(const std::vector<double>& c) const {
  require(impl_->kind == OperatorKind::diagonal_svd, "synthesis: diagonal_svd operators only");
  require(c.size() == impl_->basis->size(), "synthesis: coefficient count mismatch");
  Signal out(impl_->grid);
  impl_->synthesis(c, out.values());
  return out;
}

const std::vector<double>& ForwardOperator::singular_values() const {
  require(impl_->kind == OperatorKind::diagonal_svd, "singular_values: diagonal_svd operators only");
  return impl_->s;
}

const Dictionary& ForwardOperator::basis() const {
  require(impl_->kind == OperatorKind::diagonal_svd, "basis: diagonal_svd operators only");
  return *impl_->basis;
}

}  // namespace smre
