#pragma once

// Pseudo-likelihood fitting of conditional-extremes models to threshold
// exceedances under a working normal residual law, with residual-based
// conditional quantile curves.

#include <cstdint>
#include <string>
#include <vector>

#include "invms/ims.hpp"
#include "invms/norming.hpp"
#include "invms/numerics.hpp"

namespace invms {

enum class ModelKind {
  CanonicalHT,   // alpha in [0, 1], beta < 1, mu, sigma > 0
  SmithNorming,  // lambda > 0, mu, sigma > 0
  GammaNorming,  // gamma > 0, kappa > 0, delta, mu, sigma > 0
};

std::string_view model_kind_name(ModelKind k);
ModelKind model_kind_from_name(std::string_view name);  // ParseError

/// Natural parameter names in estimate order.
std::vector<std::string> model_parameter_names(ModelKind k);

/// Upper cap on beta for the canonical model.
inline constexpr double kBetaCap = 0.999;

struct FitOptions {
  double threshold_quantile = 0.935;
  /// false: u = -log(1 - q) (known unit exponential margin);
  /// true: u = type-7 empirical q-quantile of x.
  bool empirical_threshold = false;
  std::size_t min_exceedances = 30;
  MinimizeOptions minimize{};
};

struct ConditionalFit {
  ModelKind kind = ModelKind::CanonicalHT;
  std::vector<double> estimates;  // natural parameters, model_parameter_names order
  double threshold_u = 0.0;
  double threshold_quantile = 0.0;
  bool empirical_threshold = false;
  std::vector<Pair> exceedances;  // (x, y) with x > u, input order
  std::vector<double> residuals;  // (y - a(x)) / b(x)
  double nll = 0.0;
  bool converged = false;
  int evaluations = 0;

  std::size_t n_exceed() const { return exceedances.size(); }
  double a(double x) const;
  double b(double x) const;
  double mu() const { return estimates[estimates.size() - 2]; }
  double sigma() const { return estimates.back(); }
  double estimate(std::string_view name) const;
};

/// a(x), b(x) of a model at natural parameters (norming part only).
NormingPair model_norming(ModelKind kind, const std::vector<double>& natural);

/// sum_i [log b(x_i) + log sigma + (y_i - a(x_i) - b(x_i) mu)^2 / (2 b(x_i)^2 sigma^2)];
/// +inf where b is not positive and finite.
double negative_log_likelihood(ModelKind kind, const std::vector<double>& natural,
                               const std::vector<Pair>& exceedances);

/// Starting values in natural parameters. DataError on empty input or when
/// all responses are equal.
std::vector<double> initialize_parameters(const std::vector<Pair>& exceedances, ModelKind kind,
                                          double threshold_u);

/// DataError when fewer than min_exceedances points exceed the threshold, or
/// when a norming model is asked for with u <= 1. Non-convergence is flagged,
/// not thrown.
ConditionalFit fit_model(const std::vector<Pair>& data, ModelKind kind,
                         const FitOptions& opts = {});

struct QuantileCurve {
  double prob = 0.5;
  std::vector<double> x_grid;
  std::vector<double> values;  // a(x) + b(x) z_p
};

/// z_p is the type-7 empirical quantile of the residuals. StateError when the
/// fit holds no residuals; DomainError for x below the threshold.
std::vector<QuantileCurve> quantile_curves(const ConditionalFit& fit,
                                           const std::vector<double>& probs,
                                           const std::vector<double>& x_grid);

/// Exact conditional quantile curves of the distribution on the same grid.
std::vector<QuantileCurve> theoretical_curves(const ImsDistribution& d,
                                              const std::vector<double>& probs,
                                              const std::vector<double>& x_grid);

struct CurveDiscrepancy {
  double prob = 0.5;
  std::vector<double> x_grid;
  std::vector<double> fitted;
  std::vector<double> theory;
  std::vector<double> difference;  // fitted - theory
  double mean_abs = 0.0;
};

std::vector<CurveDiscrepancy> compare_to_theory(const std::vector<QuantileCurve>& curves,
                                                const ImsDistribution& d);

/// {model, estimates, stderr, nll, converged, threshold, ..., residual_quantiles}
std::string fit_to_json(const ConditionalFit& fit);

// ---------------------------------------------------------------------------
// Replicated quantile study: simulate, fit each model, average the curves.

struct QuantileStudyConfig {
  ExponentFamily family = ExponentFamily::smith(1.3);
  std::size_t reps = 100;
  std::size_t n = 1000;
  double threshold_quantile = 0.935;
  std::uint64_t seed = 1;
  std::vector<double> probs{0.025, 0.5, 0.975};
  /// Empty: 50 points from u to -log(1/n).
  std::vector<double> x_grid;
  std::vector<ModelKind> models{ModelKind::CanonicalHT, ModelKind::SmithNorming};
};

struct QuantileStudyResult {
  std::vector<double> x_grid;
  std::vector<double> probs;
  std::vector<ModelKind> models;
  /// averaged[m][k][i]: model m, prob k, grid point i.
  std::vector<std::vector<std::vector<double>>> averaged;
  std::vector<std::vector<double>> theory;  // [k][i]
  std::vector<double> iqr;                  // exact conditional IQR at each grid x
  std::vector<std::size_t> fits_used;       // per model
  std::vector<std::size_t> fits_nonconverged;
};

QuantileStudyResult run_quantile_study(const QuantileStudyConfig& cfg);

}  // namespace invms
