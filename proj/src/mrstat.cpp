#include "smre/mrstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smre/error.hpp"
#include "smre/kernels.hpp"

namespace smre {

std::string to_string(MrFamilyKind kind) {
  switch (kind) {
    case MrFamilyKind::penalized_logN: return "penalized_logN";
    case MrFamilyKind::scale_calibrated: return "scale_calibrated";
    case MrFamilyKind::plain: return "plain";
  }
  return "unknown";
}

MrFamily MrFamily::scale_calibrated(double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), "MrFamily: gamma must be positive");
  return {MrFamilyKind::scale_calibrated, gamma, 1.0};
}

double family_offset(const MrFamily& family, std::size_t N, double r) {
  require(r > 0.0 && r <= 1.0 + 1e-12, "family_offset: r must lie in (0, 1]");
  switch (family.kind) {
    case MrFamilyKind::penalized_logN:
      require(N >= 2, "family_offset: penalized_logN needs N >= 2");
      return std::sqrt(2.0 * std::log(static_cast<double>(N)));
    case MrFamilyKind::scale_calibrated: {
      const double lr = std::log(std::min(r, 1.0));
      return std::sqrt(-2.0 * family.gamma * lr);
    }
    case MrFamilyKind::plain: return 0.0;
  }
  return 0.0;
}

double eval_t(const MrFamily& family, std::size_t N, double s, double r) {
  require(s >= 0.0, "eval_t: s must be non-negative");
  return s - family_offset(family, N, r);
}

double lambda_N(const MrFamily& family, std::size_t N, double r) {
  return -family_offset(family, N, r);
}

MrStatistic::MrStatistic(const Dictionary& dict, MrFamily family)
    : dict_(&dict), family_(family), offsets_(dict.size()) {
  const std::size_t N = dict.size();
  for (std::size_t n = 0; n < N; ++n) offsets_[n] = family_offset(family, N, dict.atom_norm(n));
}

StatValue MrStatistic::evaluate(const Signal& v, bool keep_margins) const {
  require(v.grid() == dict_->grid(), "eval_T: grid mismatch");
  Projector proj(*dict_);
  std::vector<double> coeff(size());
  return evaluate(proj, v.values(), coeff, keep_margins);
}

StatValue MrStatistic::evaluate(Projector& proj, std::span<const double> v,
                                std::span<double> coeff, bool keep_margins) const {
  proj.load(v);
  proj.all(coeff);
  const auto best = kernels::max_abs_minus(coeff, offsets_);
  StatValue out{best.value, best.index, {}};
  if (keep_margins) {
    out.margins.resize(coeff.size());
    for (std::size_t n = 0; n < coeff.size(); ++n) out.margins[n] = std::abs(coeff[n]) - offsets_[n];
  }
  return out;
}

StatValue eval_T(const Dictionary& dict, const MrFamily& family, const Signal& v) {
  return MrStatistic(dict, family).evaluate(v);
}

double lambda_inf(const Dictionary& dict, const MrFamily& family) {
  double worst = 0.0;
  const std::size_t N = dict.size();
  for (std::size_t n = 0; n < N; ++n)
    worst = std::max(worst, family_offset(family, N, dict.atom_norm(n)));
  return -worst;
}

MrAxiomReport check_mr_axioms(const TFunction& t, double lipschitz, std::span<const double> s_in,
                              std::span<const double> r_samples, double sigma0) {
  require(sigma0 > 0.0 && sigma0 < 1.0, "check_mr_axioms: sigma0 must lie in (0, 1)");
  MrAxiomReport rep;
  std::vector<double> s(s_in.begin(), s_in.end());
  std::sort(s.begin(), s.end());
  rep.degenerate = s.size() < 2;
  constexpr double tol = 1e-12;
  const double c1 = 1.0 - sigma0;
  const double c2 = 1.0;
  auto fail = [&](bool& flag, std::string msg) {
    if (flag) rep.failures.push_back(std::move(msg));
    flag = false;
  };
  for (double r : r_samples) {
    const std::string at_r = " at r=" + std::to_string(r);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double a = s[i], b = s[i + 1];
      const double ta = t(a, r), tb = t(b, r);
      const double scale = 1.0 + std::abs(ta) + std::abs(tb);
      if (tb < ta - tol * scale) fail(rep.monotone, "monotone" + at_r);
      if (std::abs(tb - ta) > lipschitz * (b - a) + tol * scale) fail(rep.lipschitz, "lipschitz" + at_r);
      if (t(0.5 * (a + b), r) > 0.5 * (ta + tb) + tol * scale) fail(rep.convex, "convex" + at_r);
    }
    // Convexity across non-adjacent samples catches kinks the adjacent pairs miss.
    for (std::size_t i = 0; i + 2 < s.size(); i += 2) {
      const double a = s[i], b = s[i + 2];
      const double scale = 1.0 + std::abs(t(a, r)) + std::abs(t(b, r));
      if (t(0.5 * (a + b), r) > 0.5 * (t(a, r) + t(b, r)) + tol * scale) fail(rep.convex, "convex" + at_r);
    }
    double lam = t(0.0, r);
    for (double x : s) lam = std::min(lam, t(x, r));
    if (!(std::isfinite(lam) && lam < 0.0)) fail(rep.lower_bound, "lower_bound" + at_r);
    for (double frac : {0.25, 0.5, 0.99}) {
      const double sig = frac * sigma0;
      for (double x : s) {
        const double lhs = t(x, r);
        const double rhs = c1 * x + c2 * t(sig * x, r);
        if (lhs < rhs - tol * (1.0 + std::abs(lhs) + std::abs(rhs))) fail(rep.inequality, "inequality" + at_r);
      }
    }
  }
  return rep;
}

MrAxiomReport check_mr_axioms(const MrFamily& family, std::size_t N,
                              std::span<const double> s_samples, std::span<const double> r_samples,
                              double sigma0) {
  auto t = [&](double s, double r) { return eval_t(family, N, s, r); };
  return check_mr_axioms(t, family.lipschitz, s_samples, r_samples, sigma0);
}

}  // namespace smre
