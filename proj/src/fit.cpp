#include "invms/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "invms/error.hpp"
#include "invms/sample_stats.hpp"
#include "invms/simulate.hpp"

namespace invms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Unconstrained coordinates: logit / log maps keep every simplex vertex valid.
std::vector<double> to_free(ModelKind kind, const std::vector<double>& nat) {
  switch (kind) {
    case ModelKind::CanonicalHT:
      return {logit(std::clamp(nat[0], 1e-9, 1.0 - 1e-9)), std::log(kBetaCap - nat[1]), nat[2],
              std::log(nat[3])};
    case ModelKind::SmithNorming:
      return {std::log(nat[0]), nat[1], std::log(nat[2])};
    case ModelKind::GammaNorming:
      return {std::log(nat[0]), std::log(nat[1]), nat[2], nat[3], std::log(nat[4])};
  }
  return nat;
}

std::vector<double> to_natural(ModelKind kind, std::span<const double> f) {
  switch (kind) {
    case ModelKind::CanonicalHT:
      return {logistic(f[0]), kBetaCap - std::exp(f[1]), f[2], std::exp(f[3])};
    case ModelKind::SmithNorming:
      return {std::exp(f[0]), f[1], std::exp(f[2])};
    case ModelKind::GammaNorming:
      return {std::exp(f[0]), std::exp(f[1]), f[2], f[3], std::exp(f[4])};
  }
  return {f.begin(), f.end()};
}

// Standardized responses z_i = (y_i - a(x_i)) / b(x_i); empty when b fails.
std::vector<double> standardize(const NormingPair& np, const std::vector<Pair>& ex) {
  std::vector<double> z;
  z.reserve(ex.size());
  for (const auto& [x, y] : ex) {
    const double b = np.b(x);
    const double a = np.a(x);
    if (!(b > 0.0) || !std::isfinite(b) || !std::isfinite(a)) return {};
    z.push_back((y - a) / b);
  }
  return z;
}

// Closed-form (mu, sigma) for fixed norming parameters.
std::pair<double, double> profile_location_scale(const std::vector<double>& z) {
  const double m = mean(z);
  double ss = 0.0;
  for (double v : z) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / double(z.size()))};
}

}  // namespace

std::string_view model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::CanonicalHT: return "canonical";
    case ModelKind::SmithNorming: return "smith";
    case ModelKind::GammaNorming: return "gamma";
  }
  return "unknown";
}

ModelKind model_kind_from_name(std::string_view name) {
  if (name == "canonical" || name == "ht") return ModelKind::CanonicalHT;
  if (name == "smith") return ModelKind::SmithNorming;
  if (name == "gamma" || name == "gammavarying") return ModelKind::GammaNorming;
  throw ParseError("unknown model '" + std::string(name) + "' (expected canonical, smith, gamma)");
}

std::vector<std::string> model_parameter_names(ModelKind k) {
  switch (k) {
    case ModelKind::CanonicalHT: return {"alpha", "beta", "mu", "sigma"};
    case ModelKind::SmithNorming: return {"lambda", "mu", "sigma"};
    case ModelKind::GammaNorming: return {"gamma", "kappa", "delta", "mu", "sigma"};
  }
  return {};
}

NormingPair model_norming(ModelKind kind, const std::vector<double>& nat) {
  switch (kind) {
    case ModelKind::CanonicalHT: return NormingPair::canonical(nat[0], nat[1]);
    case ModelKind::SmithNorming: return NormingPair::smith(nat[0]);
    case ModelKind::GammaNorming: return NormingPair::gamma_vary(nat[0], nat[1], nat[2]);
  }
  throw DomainError("model_norming: unknown model");
}

double negative_log_likelihood(ModelKind kind, const std::vector<double>& nat,
                               const std::vector<Pair>& ex) {
  if (nat.size() != model_parameter_names(kind).size())
    throw DomainError("negative_log_likelihood: wrong number of parameters");
  const double mu = nat[nat.size() - 2], sigma = nat.back();
  if (!(sigma > 0.0) || !std::isfinite(mu)) return kInf;
  NormingPair np;
  try {
    np = model_norming(kind, nat);
  } catch (const DomainError&) {
    return kInf;
  }
  double out = 0.0;
  const double log_sigma = std::log(sigma);
  for (const auto& [x, y] : ex) {
    const double b = np.b(x);
    const double a = np.a(x);
    if (!(b > 0.0) || !std::isfinite(b) || !std::isfinite(a)) return kInf;
    const double r = (y - a - b * mu) / (b * sigma);
    out += std::log(b) + log_sigma + 0.5 * r * r;
  }
  return std::isfinite(out) ? out : kInf;
}

std::vector<double> initialize_parameters(const std::vector<Pair>& ex, ModelKind kind,
                                          double u) {
  if (ex.empty()) throw DataError("initialize_parameters: no exceedances");
  std::vector<double> xs, ys;
  for (const auto& [x, y] : ex) {
    xs.push_back(x);
    ys.push_back(y);
  }
  if (std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys.front(); }))
    throw DataError("initialize_parameters: all responses are equal");

  std::vector<double> nat;
  switch (kind) {
    case ModelKind::CanonicalHT: {
      double rho = xs.size() > 1 ? spearman_correlation(xs, ys) : 0.0;
      if (!std::isfinite(rho)) rho = 0.0;
      const double alpha = std::clamp(rho, 0.05, 0.95);
      const double beta = 0.2;
      std::vector<double> scaled;
      for (std::size_t i = 0; i < xs.size(); ++i) scaled.push_back(ys[i] / std::pow(xs[i], beta));
      double sd = scaled.size() > 1 ? sample_sd(scaled) : 1.0;
      if (!(sd > 0.0)) sd = 1.0;
      return {alpha, beta, 0.0, sd};
    }
    case ModelKind::SmithNorming: {
      // eta from Pr(X > u, Y > u) = Pr(Y > u | X > u) e^{-u} = e^{-u / eta},
      // then 1 / eta = V(1, 1) = 2 Phi(lambda / 2).
      double lambda = 1.0;
      const double above = double(std::count_if(ys.begin(), ys.end(), [&](double v) { return v > u; }));
      if (above > 0.0 && u > 0.0) {
        const double log_joint = std::log(above / double(ys.size())) - u;
        const double eta_hat = -u / log_joint;
        const double p = 0.5 / eta_hat;
        if (p > 0.5 && p < 1.0) lambda = 2.0 * std_normal_quantile(p);
      }
      nat = {lambda, 0.0, 1.0};
      break;
    }
    case ModelKind::GammaNorming:
      nat = {1.0, 1.0, 0.0, 0.0, 1.0};
      break;
  }
  // Location and scale of the standardized responses at the norming start.
  const auto z = standardize(model_norming(kind, nat), ex);
  if (z.size() == ex.size() && z.size() > 1) {
    const double m = mean(z), sd = sample_sd(z);
    if (std::isfinite(m) && sd > 0.0 && std::isfinite(sd)) {
      nat[nat.size() - 2] = m;
      nat.back() = sd;
    }
  }
  return nat;
}

ConditionalFit fit_model(const std::vector<Pair>& data, ModelKind kind, const FitOptions& opts) {
  const double q = opts.threshold_quantile;
  if (!(q > 0.0 && q < 1.0)) throw DomainError("fit_model: threshold quantile must lie in (0, 1)");
  if (data.empty()) throw DataError("fit_model: empty data");
  for (const auto& [x, y] : data) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DataError("fit_model: non-finite data");
  }

  ConditionalFit fit;
  fit.kind = kind;
  fit.threshold_quantile = q;
  fit.empirical_threshold = opts.empirical_threshold;
  if (opts.empirical_threshold) {
    std::vector<double> xs;
    for (const auto& p : data) xs.push_back(p.first);
    fit.threshold_u = empirical_quantile(xs, q);
  } else {
    fit.threshold_u = -std::log1p(-q);
  }
  const double u = fit.threshold_u;
  if (kind != ModelKind::CanonicalHT && !(u > 1.0))
    throw DataError("fit_model: the " + std::string(model_kind_name(kind)) +
                    " norming needs a threshold above 1 (log log x undefined), got u = " +
                    std::to_string(u));
  for (const auto& p : data) {
    if (p.first > u) fit.exceedances.push_back(p);
  }
  if (fit.exceedances.size() < opts.min_exceedances)
    throw DataError("fit_model: " + std::to_string(fit.exceedances.size()) +
                    " exceedances above u = " + std::to_string(u) + ", need at least " +
                    std::to_string(opts.min_exceedances));

  const auto& ex = fit.exceedances;
  auto objective = [&](std::span<const double> f) {
    return negative_log_likelihood(kind, to_natural(kind, f), ex);
  };

  std::vector<double> nat = initialize_parameters(ex, kind, u);
  std::vector<double> start = to_free(kind, nat);
  std::vector<double> scale(start.size(), 0.5);
  MinimizeResult res = minimize(objective, start, scale, opts.minimize);
  fit.evaluations = res.evaluations;

  // Profile polish: (mu, sigma) have a closed form given the norming
  // parameters. Restart from there once, then apply it to the final point.
  auto polish = [&](std::vector<double> natural) {
    const auto z = standardize(model_norming(kind, natural), ex);
    if (z.size() == ex.size()) {
      const auto [m, s] = profile_location_scale(z);
      if (std::isfinite(m) && s > 0.0) {
        natural[natural.size() - 2] = m;
        natural.back() = s;
      }
    }
    return natural;
  };
  nat = polish(to_natural(kind, res.point));
  MinimizeResult res2 = minimize(objective, to_free(kind, nat), scale, opts.minimize);
  fit.evaluations += res2.evaluations;
  const bool converged = res.converged && res2.converged;
  const auto& best = res2.value <= res.value ? res2.point : res.point;
  nat = polish(to_natural(kind, best));

  fit.estimates = nat;
  fit.nll = negative_log_likelihood(kind, nat, ex);
  fit.converged = converged && std::isfinite(fit.nll);
  fit.residuals = standardize(model_norming(kind, nat), ex);
  if (fit.residuals.size() != ex.size()) {
    fit.residuals.clear();
    fit.converged = false;
  }
  return fit;
}

double ConditionalFit::a(double x) const { return model_norming(kind, estimates).a(x); }
double ConditionalFit::b(double x) const { return model_norming(kind, estimates).b(x); }

double ConditionalFit::estimate(std::string_view name) const {
  const auto names = model_parameter_names(kind);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return estimates.at(i);
  }
  throw DomainError("fit: no parameter named '" + std::string(name) + "'");
}

std::vector<QuantileCurve> quantile_curves(const ConditionalFit& fit,
                                           const std::vector<double>& probs,
                                           const std::vector<double>& x_grid) {
  if (fit.residuals.empty()) throw StateError("quantile_curves: fit holds no residuals");
  std::vector<double> sorted = fit.residuals;
  std::sort(sorted.begin(), sorted.end());
  const NormingPair np = model_norming(fit.kind, fit.estimates);
  std::vector<QuantileCurve> out;
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile_curves: probabilities must lie in (0, 1)");
    const double zp = empirical_quantile_sorted(sorted, p);
    QuantileCurve c;
    c.prob = p;
    c.x_grid = x_grid;
    for (double x : x_grid) {
      if (x < fit.threshold_u) throw DomainError("quantile_curves: grid point below the threshold");
      c.values.push_back(np.a(x) + np.b(x) * zp);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<QuantileCurve> theoretical_curves(const ImsDistribution& d,
                                              const std::vector<double>& probs,
                                              const std::vector<double>& x_grid) {
  std::vector<QuantileCurve> out;
  for (double p : probs) {
    QuantileCurve c;
    c.prob = p;
    c.x_grid = x_grid;
    for (double x : x_grid) c.values.push_back(conditional_quantile_exact(d, p, x));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CurveDiscrepancy> compare_to_theory(const std::vector<QuantileCurve>& curves,
                                                const ImsDistribution& d) {
  std::vector<CurveDiscrepancy> out;
  for (const auto& c : curves) {
    if (c.values.size() != c.x_grid.size())
      throw DomainError("compare_to_theory: curve values and grid differ in length");
    CurveDiscrepancy r;
    r.prob = c.prob;
    r.x_grid = c.x_grid;
    r.fitted = c.values;
    double sum = 0.0;
    for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
      const double th = conditional_quantile_exact(d, c.prob, c.x_grid[i]);
      r.theory.push_back(th);
      r.difference.push_back(c.values[i] - th);
      sum += std::fabs(c.values[i] - th);
    }
    r.mean_abs = c.x_grid.empty() ? 0.0 : sum / double(c.x_grid.size());
    out.push_back(std::move(r));
  }
  return out;
}

std::string fit_to_json(const ConditionalFit& fit) {
  nlohmann::ordered_json j;
  j["model"] = std::string(model_kind_name(fit.kind));
  nlohmann::ordered_json est = nlohmann::ordered_json::object();
  const auto names = model_parameter_names(fit.kind);
  for (std::size_t i = 0; i < names.size() && i < fit.estimates.size(); ++i)
    est[names[i]] = fit.estimates[i];
  j["estimates"] = est;
  j["stderr"] = nullptr;
  j["nll"] = fit.nll;
  j["converged"] = fit.converged;
  j["threshold"] = fit.threshold_u;
  j["threshold_quantile"] = fit.threshold_quantile;
  j["empirical_threshold"] = fit.empirical_threshold;
  j["n_exceed"] = fit.n_exceed();
  nlohmann::ordered_json rq = nlohmann::ordered_json::object();
  if (!fit.residuals.empty()) {
    for (double p : {0.025, 0.25, 0.5, 0.75, 0.975}) {
      char key[16];
      std::snprintf(key, sizeof key, "%g", p);
      rq[key] = empirical_quantile(fit.residuals, p);
    }
  }
  j["residual_quantiles"] = rq;
  j["quantile_convention"] = "type7";
  j["optimizer"] = "nelder-mead with restart and profile polish";
  j["evaluations"] = fit.evaluations;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

QuantileStudyResult run_quantile_study(const QuantileStudyConfig& cfg) {
  if (cfg.reps == 0 || cfg.n == 0) throw DomainError("quantile study: reps and n must be >= 1");
  if (cfg.probs.empty() || cfg.models.empty())
    throw DomainError("quantile study: need at least one probability and one model");
  QuantileStudyResult r;
  r.probs = cfg.probs;
  r.models = cfg.models;
  const double u = -std::log1p(-cfg.threshold_quantile);
  r.x_grid = cfg.x_grid;
  if (r.x_grid.empty()) {
    const double top = std::log(double(cfg.n));
    if (!(top > u)) throw DomainError("quantile study: n too small for a grid above u");
    for (int i = 0; i < 50; ++i) r.x_grid.push_back(u + (top - u) * (i + 0.5) / 50.0);
  }
  const ImsDistribution d(cfg.family);
  for (const auto& c : theoretical_curves(d, cfg.probs, r.x_grid)) r.theory.push_back(c.values);
  for (double x : r.x_grid) {
    r.iqr.push_back(conditional_quantile_exact(d, 0.75, x) - conditional_quantile_exact(d, 0.25, x));
  }

  const std::size_t nm = cfg.models.size(), np = cfg.probs.size(), ng = r.x_grid.size();
  r.averaged.assign(nm, std::vector<std::vector<double>>(np, std::vector<double>(ng, 0.0)));
  r.fits_used.assign(nm, 0);
  r.fits_nonconverged.assign(nm, 0);
  FitOptions opts;
  opts.threshold_quantile = cfg.threshold_quantile;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    RandomStream stream(cfg.seed, rep);
    const SampleSet s = sample(cfg.family, cfg.n, stream);
    for (std::size_t m = 0; m < nm; ++m) {
      ConditionalFit f;
      try {
        f = fit_model(s.pairs, cfg.models[m], opts);
      } catch (const DataError&) {
        continue;
      }
      if (f.residuals.empty()) continue;
      if (!f.converged) ++r.fits_nonconverged[m];
      const auto curves = quantile_curves(f, cfg.probs, r.x_grid);
      for (std::size_t k = 0; k < np; ++k) {
        for (std::size_t i = 0; i < ng; ++i) r.averaged[m][k][i] += curves[k].values[i];
      }
      ++r.fits_used[m];
    }
  }
  for (std::size_t m = 0; m < nm; ++m) {
    if (r.fits_used[m] == 0) continue;
    for (auto& row : r.averaged[m]) {
      for (double& v : row) v /= double(r.fits_used[m]);
    }
  }
  return r;
}

}  // namespace invms
