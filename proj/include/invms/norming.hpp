#pragma once

// Conditioned-extremes norming functions a(x), b(x) and limit laws G for the
// lower-tail classes of the spectral measure, with numerical convergence
// diagnostics for the exact conditional laws.

#include <string>
#include <vector>

#include "invms/exponent.hpp"
#include "invms/numerics.hpp"

namespace invms {

/// Lower-tail behaviour of H near w_lower.
enum class TailCase {
  RegularNoAtom,  // h(w) ~ s (w - w_l)^t, no mass at w_l
  Atom,           // H({w_l}) > 0
  Smith,          // Gamma-varying Husler-Reiss tail
  GammaVarying,   // h(w) ~ c w^delta exp(-kappa w^-gamma)
};

struct TailClass {
  TailCase kind = TailCase::Atom;
  double w_lower = 0.0;
  double atom = 0.0;  // H({w_lower})
  double t = 0.0;     // regular-variation index (RegularNoAtom)
  double s = 1.0;     // limit of the slowly varying part (RegularNoAtom)
};

/// UnsupportedError for families whose lower tail is not catalogued.
TailClass classify_tail(const ExponentFamily& fam);

enum class NormingKind { Canonical, Corollary1i, Corollary1ii, Smith, GammaVary };

class NormingPair {
 public:
  /// a(x) = alpha x, b(x) = x^beta; alpha in [0, 1], beta < 1.
  static NormingPair canonical(double alpha, double beta);
  /// a(x) = w_l x / (1 - w_l), b(x) = x^{(t+1)/(t+2)} L(x^{-1/(t+2)})^{-1/(t+2)}.
  static NormingPair corollary1_i(double w_lower, double t, RealFn slowly_varying);
  /// Same with L constant, the constant being carried by the limit law.
  static NormingPair corollary1_i(double w_lower, double t);
  /// a(x) = w_l x / (1 - w_l), b(x) = 1.
  static NormingPair corollary1_ii(double w_lower, double atom);
  /// Husler-Reiss normings; defined for x > 1.
  static NormingPair smith(double lambda);
  /// Normings for the gamma-varying tail; defined for x > 1.
  static NormingPair gamma_vary(double gamma, double kappa, double delta);

  NormingKind kind() const { return kind_; }
  const std::vector<Param>& params() const { return params_; }
  double a(double x) const;
  double b(double x) const;

 private:
  NormingKind kind_ = NormingKind::Canonical;
  std::vector<Param> params_;
  RealFn a_, b_;
  double min_x_ = 0.0;  // a, b defined for x > min_x_
};

std::string_view norming_kind_name(NormingKind k);

enum class LimitKind {
  WeibullType,
  Corollary1i,
  Corollary1ii,
  RevertedGumbelSmith,
  RevertedGumbelGamma,
  WorkingNormal,
};

class LimitLaw {
 public:
  /// 1 - exp{-s z^{t+2} / ((t+1)(t+2))}, z > 0.
  static LimitLaw weibull_type(double s, double t);
  /// 1 - exp{-s (1 - w_l)^{3+2t} z^{t+2} / ((t+1)(t+2))}, z > 0.
  static LimitLaw corollary1_i(double w_lower, double t, double s = 1.0);
  /// 1 - {1 - w_l H} exp{-(1 - w_l) H z}, z >= 0, atom w_l H at zero.
  static LimitLaw corollary1_ii(double w_lower, double atom);
  /// 1 - exp{-lambda (8 pi)^{-1/2} exp(sqrt(2) z / lambda)}.
  static LimitLaw reverted_gumbel_smith(double lambda);
  /// 1 - exp[-C kappa^{(delta+2)/gamma} / gamma^2 exp(gamma kappa^{-1/gamma} z)],
  /// C the constant of the density tail (1 for an exact w^delta exp(-kappa w^-gamma)).
  static LimitLaw reverted_gumbel_gamma(double gamma, double kappa, double delta,
                                        double tail_constant = 1.0);
  static LimitLaw working_normal(double mu, double sigma);

  LimitKind kind() const { return kind_; }
  const std::vector<Param>& params() const { return params_; }
  double cdf(double z) const;
  /// Left-continuous inverse; returns 0 inside the atom at zero.
  double quantile(double p) const;
  double atom_at_zero() const { return kind_ == LimitKind::Corollary1ii ? c_ : 0.0; }

 private:
  LimitKind kind_ = LimitKind::WorkingNormal;
  std::vector<Param> params_;
  // Weibull: G = 1 - exp(-c z^d); reverted Gumbel: 1 - exp(-c e^{d z});
  // Corollary1ii: atom c, rate d; normal: mean c, sd d.
  double c_ = 0.0, d_ = 1.0;
};

std::string_view limit_kind_name(LimitKind k);

NormingPair norming_for(const ExponentFamily& fam);
LimitLaw limit_law_for(const ExponentFamily& fam);

/// Closed-form asymptote of log Pr(Y > y | X = x) for large x with
/// y / (x + y) near w_lower.
double asymptotic_log_survivor(const ExponentFamily& fam, double x, double y);

struct ConvergencePoint {
  double u = 0.0;
  double distance = 0.0;  // sup_z |F_u(z) - G(z)|
  double z_at_sup = 0.0;
};

/// D(u) = sup_z |Pr{(Y - a(u)) / b(u) <= z | X = u} - G(z)| on a grid of
/// `grid` points spanning the 0.001 and 0.999 quantiles of G.
ConvergencePoint convergence_distance(const ExponentFamily& fam, double u, int grid = 512);
ConvergencePoint convergence_distance(const ExponentFamily& fam, const NormingPair& np,
                                      const LimitLaw& g, double u, int grid = 512);

struct PsiRow {
  double t;
  double x;
  double psi1;  // b(t + x) / b(t)
  double psi2;  // {a(t + x) - a(t)} / b(t)
};

std::vector<PsiRow> ht_psi_check(const NormingPair& np, const std::vector<double>& x_grid,
                                 const std::vector<double>& t_grid);

/// End-point approach path: y solving y (1 - w_l) - w_l x = sqrt(x + y), so that
/// y / (x + y) = w_l + (x + y)^{-1/2}.
double lemma1_path_y(double x, double w_lower);

}  // namespace invms
