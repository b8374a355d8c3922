#pragma once

// Multiresolution statistics T_N(v) = max_n t_N(|<v, phi_n*>|, |phi_n|) for the
// additive family t_N(s, r) = s - f_N(r).

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smre/dictionary.hpp"
#include "smre/grid.hpp"

namespace smre {

enum class MrFamilyKind {
  penalized_logN,    // f_N(r) = sqrt(2 log N)
  scale_calibrated,  // f_N(r) = sqrt(-2 gamma log r)
  plain,             // f_N(r) = 0, the raw local-average statistic
};

std::string to_string(MrFamilyKind kind);

struct MrFamily {
  MrFamilyKind kind = MrFamilyKind::penalized_logN;
  double gamma = 1.0;
  double lipschitz = 1.0;

  static MrFamily penalized_logN() { return {MrFamilyKind::penalized_logN, 1.0, 1.0}; }
  static MrFamily scale_calibrated(double gamma);
  static MrFamily plain() { return {MrFamilyKind::plain, 1.0, 1.0}; }
};

/// f_N(r).
double family_offset(const MrFamily& family, std::size_t N, double r);
/// t_N(s, r) = s - f_N(r).
double eval_t(const MrFamily& family, std::size_t N, double s, double r);
/// lambda_N(r) = inf_s t_N(s, r) = -f_N(r).
double lambda_N(const MrFamily& family, std::size_t N, double r);

struct StatValue {
  double value = 0.0;
  std::size_t argmax_atom = 0;
  std::vector<double> margins;  // per-atom t_N terms, filled on request
};

/// A dictionary paired with a family, with f_N(|phi_n|) precomputed per atom.
class MrStatistic {
 public:
  MrStatistic(const Dictionary& dict, MrFamily family);

  const Dictionary& dictionary() const { return *dict_; }
  const MrFamily& family() const { return family_; }
  std::size_t size() const { return offsets_.size(); }
  /// f_N(|phi_n|) for every atom.
  const std::vector<double>& offsets() const { return offsets_; }

  StatValue evaluate(const Signal& v, bool keep_margins = false) const;
  /// Same, reusing a projector already bound to this dictionary.
  StatValue evaluate(Projector& proj, std::span<const double> v, std::span<double> coeff_scratch,
                     bool keep_margins = false) const;

 private:
  const Dictionary* dict_;
  MrFamily family_;
  std::vector<double> offsets_;
};

StatValue eval_T(const Dictionary& dict, const MrFamily& family, const Signal& v);

/// inf_n lambda_N(|phi_n|) = -max_n f_N(|phi_n|).
double lambda_inf(const Dictionary& dict, const MrFamily& family);

struct MrAxiomReport {
  bool monotone = true;
  bool convex = true;
  bool lipschitz = true;
  bool lower_bound = true;  // 0 > lambda_N(r) > -inf on every sampled r
  bool inequality = true;   // t(s,r) >= c1 s + c2 t(sigma s, r) for sigma < sigma0
  bool degenerate = false;  // fewer than two s samples: shape checks vacuous
  std::vector<std::string> failures;
  bool all_pass() const { return monotone && convex && lipschitz && lower_bound && inequality; }
};

using TFunction = std::function<double(double s, double r)>;

/// Samples the Definition-style axioms of t on the product grid s_samples x r_samples.
/// c1 = 1 - sigma0 and c2 = 1 are the constants of the additive family.
MrAxiomReport check_mr_axioms(const TFunction& t, double lipschitz, std::span<const double> s_samples,
                              std::span<const double> r_samples, double sigma0);
MrAxiomReport check_mr_axioms(const MrFamily& family, std::size_t N,
                              std::span<const double> s_samples, std::span<const double> r_samples,
                              double sigma0);

}  // namespace smre
