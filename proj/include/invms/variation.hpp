#pragma once

// Numerical checks of slow variation, Gamma-variation and the integral
// expansion used for Gamma-varying spectral tails.

#include <string>
#include <vector>

#include "invms/numerics.hpp"

namespace invms {

struct SlowlyVaryingRow {
  double tau;
  double w;
  double ratio;  // L{w L(w)^-tau} / L(w)
};

struct SlowlyVaryingReport {
  std::vector<SlowlyVaryingRow> rows;
  std::vector<double> first_deviation;  // |ratio - 1| at the largest w, per tau
  std::vector<double> last_deviation;   // |ratio - 1| at the smallest w, per tau
  bool pass = false;
  std::string note;
};

/// Evaluates L{w L(w)^-tau} / L(w) along w = 10^-k, k = k_min..k_max, for each
/// tau. Passes when, for every tau, |ratio - 1| is nonincreasing over the
/// second half of the k sweep and does not end above where it started.
/// DomainError if L is nonpositive at an evaluation point.
SlowlyVaryingReport slowly_varying_condition(const RealFn& L, const std::vector<double>& tau_grid,
                                             int k_min = 2, int k_max = 12);

struct GammaVariationRow {
  double s;
  double z;
  double ratio;      // g(s + z f(s)) / g(s)
  double deviation;  // |ratio / e^z - 1|
};

struct GammaVariationReport {
  std::vector<GammaVariationRow> rows;
  double smallest_s = 0.0;
  double max_deviation_at_smallest = 0.0;
  double f_over_s_at_smallest = 0.0;
  bool deviation_decreasing = false;
  bool f_over_s_decreasing = false;
  bool pass = false;
  std::string note;
};

/// g is supplied through log g so that tails far below the double range can
/// be probed. Passes when the largest deviation at the smallest s is below
/// `threshold`, the deviation shrinks along the s sweep, and f(s)/s shrinks.
GammaVariationReport gamma_variation_check(const RealFn& log_g, const RealFn& f,
                                           const std::vector<double>& s_grid,
                                           const std::vector<double>& z_grid,
                                           double threshold = 0.01);

struct Lemma2Row {
  double w;
  double ratio;  // int_0^w U g / {U(w) f(w) g(w)}
  bool converged;
};

struct Lemma2Report {
  std::vector<Lemma2Row> rows;
  double ratio_at_smallest = 0.0;
  bool pass = false;  // |ratio - 1| <= tolerance at the smallest w
  std::string note;
};

/// The ratio is evaluated after the substitution s = w - f(w) tau, so the
/// integrand is U(s)/U(w) exp{log g(s) - log g(w)} on tau in [0, w / f(w)].
Lemma2Report lemma2_expansion_check(const RealFn& U, const RealFn& log_g, const RealFn& f,
                                    const std::vector<double>& w_grid, double tolerance = 0.02);

}  // namespace invms
