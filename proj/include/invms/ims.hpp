#pragma once

// Bivariate inverted max-stable law in unit exponential margins: joint and
// conditional survivor functions, exact conditional quantiles and marginal
// re-expression.

#include <utility>
#include <vector>

#include "invms/exponent.hpp"

namespace invms {

class ImsDistribution {
 public:
  explicit ImsDistribution(ExponentFamily fam) : fam_(std::move(fam)) {}
  const ExponentFamily& family() const { return fam_; }

 private:
  ExponentFamily fam_;
};

/// Pr(X > x, Y > y) = exp{-V(1/x, 1/y)}. Zero arguments are allowed and
/// reduce to the marginal survivor.
double joint_survivor(const ImsDistribution& d, double x, double y);

/// log Pr(Y > y | X = x) = log(-V_1(1, x/y)) + x - x V(1, x/y).
/// Returns -inf where the survivor is zero. BoundaryError on an interior
/// spectral-atom ray.
double log_conditional_survivor(const ImsDistribution& d, double y, double given_x);
double conditional_survivor(const ImsDistribution& d, double y, double given_x);

/// Pr(Y > y | X > u) from the joint survivor.
double exceedance_conditional_survivor(const ImsDistribution& d, double y, double u);

/// y with Pr(Y > y | X = x) = 1 - p, found by Brent's method in log y.
/// Where the survivor jumps (Marshall-Olkin ray) the generalized inverse is
/// returned. NumericError when no bracket can be found.
double conditional_quantile_exact(const ImsDistribution& d, double p, double given_x,
                                  double tol = 1e-12);

// ---------------------------------------------------------------------------
// Margins

enum class MarginKind { UnitExponential, UnitFrechet, Pareto, Empirical };

/// A continuous margin H with K(y) = -log{1 - H(y)} mapping it to the unit
/// exponential scale.
class MarginSpec {
 public:
  static MarginSpec unit_exponential();
  static MarginSpec unit_frechet();
  /// H(y) = 1 - y^-alpha on y >= 1.
  static MarginSpec pareto(double alpha);
  /// Piecewise linear CDF through (sorted value_i, i/(n+1)), extended
  /// linearly beyond the table. DataError unless values are strictly
  /// increasing after sorting and at least two are given.
  static MarginSpec empirical(std::vector<double> values);

  MarginKind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  /// K(y): margin -> unit exponential.
  double to_exponential(double y) const;
  /// K^{-1}(x): unit exponential -> margin.
  double from_exponential(double x) const;

 private:
  MarginKind kind_ = MarginKind::UnitExponential;
  double alpha_ = 1.0;
  std::vector<double> table_;
};

using Pair = std::pair<double, double>;

/// Maps a sample in unit exponential margins to (K_1^{-1}(X), K_2^{-1}(Y)).
std::vector<Pair> transform_margins(const std::vector<Pair>& sample, const MarginSpec& m1,
                                    const MarginSpec& m2);

/// Maps a sample in the given margins back to unit exponential margins.
std::vector<Pair> to_exponential_margins(const std::vector<Pair>& sample,
                                         const MarginSpec& m1, const MarginSpec& m2);

struct ChiRow {
  double p;
  double q;      // -log(1 - p)
  double joint;  // Pr(X > q, Y > q)
  double chi;    // Pr(Y > q | X > q)
  double eta;    // -q / log joint
};

/// Sub-asymptotic chi(p) and eta on a probability grid; DomainError when a
/// grid value is outside (0, 1).
std::vector<ChiRow> chi_bar_diagnostics(const ImsDistribution& d,
                                        const std::vector<double>& probs);

}  // namespace invms
