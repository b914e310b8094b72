#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <vector>

#include "invms/error.hpp"
#include "invms/fit.hpp"
#include "invms/numerics.hpp"
#include "invms/sample_stats.hpp"

using namespace invms;

namespace {

// Y = alpha x + x^beta Z with Z ~ N(mu, sigma^2); x unit exponential.
std::vector<Pair> ht_data(double alpha, double beta, double mu, double sigma, std::size_t n,
                          std::uint64_t seed) {
  RandomStream s(seed, 0);
  std::vector<Pair> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.exponential();
    const double z = mu + sigma * std_normal_quantile(s.uniform());
    out.emplace_back(x, alpha * x + std::pow(x, beta) * z);
  }
  return out;
}

}  // namespace

TEST_CASE("model names and parameters") {
  CHECK(model_kind_from_name("canonical") == ModelKind::CanonicalHT);
  CHECK(model_kind_from_name("smith") == ModelKind::SmithNorming);
  CHECK(model_kind_from_name("gamma") == ModelKind::GammaNorming);
  CHECK_THROWS_AS(model_kind_from_name("nope"), ParseError);
  CHECK(model_parameter_names(ModelKind::CanonicalHT) ==
        std::vector<std::string>{"alpha", "beta", "mu", "sigma"});
  CHECK(model_parameter_names(ModelKind::SmithNorming) ==
        std::vector<std::string>{"lambda", "mu", "sigma"});
}

TEST_CASE("negative log-likelihood matches the normal working model") {
  const std::vector<Pair> ex{{3.0, 2.0}, {4.5, 1.0}, {6.0, 5.5}};
  const std::vector<double> th{0.4, 0.5, 0.2, 1.3};
  double expect = 0.0;
  for (const auto& [x, y] : ex) {
    const double a = 0.4 * x, b = std::sqrt(x);
    const double r = (y - a - b * 0.2) / (b * 1.3);
    expect += std::log(b) + std::log(1.3) + 0.5 * r * r;
  }
  CHECK(negative_log_likelihood(ModelKind::CanonicalHT, th, ex) == doctest::Approx(expect));
  const std::vector<double> bad{0.4, 0.5, 0.2, -1.0};
  CHECK(std::isinf(negative_log_likelihood(ModelKind::CanonicalHT, bad, ex)));
}

TEST_CASE("canonical fit recovers generating parameters") {
  const auto data = ht_data(0.6, 0.3, 0.5, 0.8, 60000, 5);
  FitOptions o;
  o.threshold_quantile = 0.9;
  const auto fit = fit_model(data, ModelKind::CanonicalHT, o);
  CHECK(fit.converged);
  CHECK(fit.threshold_u == doctest::Approx(-std::log(0.1)));
  CHECK(fit.n_exceed() > 5000);
  CHECK(fit.estimate("alpha") == doctest::Approx(0.6).epsilon(0.05));
  CHECK(fit.estimate("beta") == doctest::Approx(0.3).epsilon(0.1));
  CHECK(fit.sigma() == doctest::Approx(0.8).epsilon(0.05));
  for (std::size_t i = 0; i < fit.n_exceed(); ++i) {
    const auto& [x, y] = fit.exceedances[i];
    REQUIRE(x > fit.threshold_u);
    CHECK(fit.residuals[i] == doctest::Approx((y - fit.a(x)) / fit.b(x)));
  }
  // minimum: perturbing any parameter raises the objective
  for (std::size_t k = 0; k < fit.estimates.size(); ++k) {
    auto th = fit.estimates;
    th[k] += 1e-3;
    CHECK(negative_log_likelihood(fit.kind, th, fit.exceedances) >= fit.nll - 1e-9);
  }
}

TEST_CASE("empirical threshold and data errors") {
  const auto data = ht_data(0.5, 0.2, 0.0, 1.0, 2000, 8);
  FitOptions o;
  o.empirical_threshold = true;
  const auto fit = fit_model(data, ModelKind::CanonicalHT, o);
  std::vector<double> xs;
  for (const auto& p : data) xs.push_back(p.first);
  CHECK(fit.threshold_u == doctest::Approx(empirical_quantile(xs, 0.935)));

  const std::vector<Pair> few(data.begin(), data.begin() + 100);
  CHECK_THROWS_AS(fit_model(few, ModelKind::CanonicalHT), DataError);
  FitOptions low;
  low.threshold_quantile = 0.5;  // u = log 2 < 1
  CHECK_THROWS_AS(fit_model(data, ModelKind::SmithNorming, low), DataError);
}

TEST_CASE("quantile curves and JSON") {
  const auto data = ht_data(0.5, 0.2, 0.0, 1.0, 4000, 9);
  const auto fit = fit_model(data, ModelKind::CanonicalHT);
  const std::vector<double> grid{3.0, 5.0, 8.0};
  const auto curves = quantile_curves(fit, {0.1, 0.5}, grid);
  REQUIRE(curves.size() == 2);
  for (const auto& c : curves) {
    const double z = empirical_quantile(fit.residuals, c.prob);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(c.values[i] == doctest::Approx(fit.a(grid[i]) + fit.b(grid[i]) * z));
  }
  CHECK_THROWS_AS(quantile_curves(fit, {0.5}, {1.0}), DomainError);
  ConditionalFit empty;
  empty.estimates = {0.5, 0.2, 0.0, 1.0};
  CHECK_THROWS_AS(quantile_curves(empty, {0.5}, {3.0}), StateError);

  const auto j = nlohmann::json::parse(fit_to_json(fit));
  for (const char* key : {"model", "estimates", "stderr", "nll", "converged", "threshold",
                          "n_exceed", "residual_quantiles"})
    CHECK(j.contains(key));
  CHECK(j["stderr"].is_null());
  CHECK(j["model"] == "canonical");
  CHECK(j["n_exceed"] == fit.n_exceed());
}

TEST_CASE("Smith norming fit on its own model") {
  // Y = a(x) + b(x) Z under the Smith norming with lambda = 1.
  const auto np = NormingPair::smith(1.0);
  RandomStream s(77, 0);
  std::vector<Pair> data;
  for (int i = 0; i < 40000; ++i) {
    const double x = s.exponential();
    const double z = 0.3 + 0.7 * std_normal_quantile(s.uniform());
    data.emplace_back(x, x > 1.0 ? np.a(x) + np.b(x) * z : 0.0);
  }
  const auto fit = fit_model(data, ModelKind::SmithNorming);
  CHECK(fit.converged);
  CHECK(fit.estimate("lambda") == doctest::Approx(1.0).epsilon(0.1));
  CHECK(fit.sigma() == doctest::Approx(0.7).epsilon(0.1));
}

TEST_CASE("replicated study averages curves per model") {
  QuantileStudyConfig cfg;
  cfg.family = ExponentFamily::smith(1.3);
  cfg.reps = 3;
  cfg.n = 1000;
  cfg.seed = 4;
  const auto r = run_quantile_study(cfg);
  REQUIRE(r.averaged.size() == 2);
  CHECK(r.x_grid.size() == 50);
  CHECK(r.x_grid.front() > -std::log(1 - 0.935));
  CHECK(r.theory.size() == 3);
  CHECK(r.iqr.size() == r.x_grid.size());
  for (std::size_t i = 0; i < r.x_grid.size(); ++i)
    CHECK(r.iqr[i] > 0.0);
  for (std::size_t m = 0; m < 2; ++m) CHECK(r.fits_used[m] + r.fits_nonconverged[m] <= 3);
  const auto again = run_quantile_study(cfg);
  CHECK(again.averaged == r.averaged);
}
