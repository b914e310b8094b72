#include <doctest.h>

#include <cmath>
#include <vector>

#include "invms/error.hpp"
#include "invms/ims.hpp"
#include "invms/verify.hpp"

using namespace invms;

namespace {

double logistic_v(double a, double x, double y) {
  return std::pow(std::pow(x, -1 / a) + std::pow(y, -1 / a), a);
}

}  // namespace

TEST_CASE("joint survivor against the closed-form logistic law") {
  const double a = 0.5;
  const ImsDistribution d(ExponentFamily::logistic(a));
  for (double x : {0.1, 1.0, 4.0}) {
    for (double y : {0.3, 2.0, 7.0}) {
      CHECK(joint_survivor(d, x, y) ==
            doctest::Approx(std::exp(-logistic_v(a, 1 / x, 1 / y))).epsilon(1e-13));
    }
  }
  CHECK(joint_survivor(d, 0.0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(joint_survivor(d, 1.5, 0.0) == doctest::Approx(std::exp(-1.5)));
  // Inverted logistic: log joint survivor at (q, q) is -2^a q.
  CHECK(std::log(joint_survivor(d, 20.0, 20.0)) == doctest::Approx(-20.0 * std::sqrt(2.0)));
}

TEST_CASE("conditional survivor is the x-derivative of the joint survivor") {
  // Pr(Y > y | X = x) = -d/dx Pr(X > x, Y > y) / e^{-x}
  for (const auto& f : catalog_representatives()) {
    if (f.id() == FamilyId::MarshallOlkin) continue;
    CAPTURE(to_spec_string(f));
    const ImsDistribution d(f);
    for (double x : {0.7, 3.0}) {
      for (double y : {0.4, 1.9, 5.0}) {
        const double h = 1e-5;
        const double fd =
            -(joint_survivor(d, x + h, y) - joint_survivor(d, x - h, y)) / (2 * h) / std::exp(-x);
        CHECK(conditional_survivor(d, y, x) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("conditional survivor shape") {
  const ImsDistribution ind(ExponentFamily::logistic(1.0));
  for (double y : {0.1, 1.0, 3.0})
    CHECK(conditional_survivor(ind, y, 2.0) == doctest::Approx(std::exp(-y)).epsilon(1e-12));

  for (const auto& f : catalog_representatives()) {
    if (f.id() == FamilyId::MarshallOlkin) continue;
    CAPTURE(to_spec_string(f));
    const ImsDistribution d(f);
    double prev = 1.0;
    for (double y = 0.05; y < 20.0; y *= 1.5) {
      const double s = conditional_survivor(d, y, 2.0);
      CHECK(s <= prev + 1e-12);
      CHECK(s >= 0.0);
      prev = s;
    }
    // Far in the tail the log survivor stays finite after the survivor underflows.
    CHECK(std::isfinite(log_conditional_survivor(d, 900.0, 1000.0)));
  }
  const ImsDistribution mo(ExponentFamily::marshall_olkin(0.5));
  CHECK_THROWS_AS(conditional_survivor(mo, 2.0, 2.0), BoundaryError);
}

TEST_CASE("exact conditional quantiles invert the survivor") {
  for (const auto& f : catalog_representatives()) {
    if (f.id() == FamilyId::MarshallOlkin) continue;
    CAPTURE(to_spec_string(f));
    const ImsDistribution d(f);
    for (double p : {0.025, 0.5, 0.975}) {
      for (double x : {1.0, 5.0, 20.0}) {
        const double q = conditional_quantile_exact(d, p, x);
        CHECK(conditional_survivor(d, q, x) == doctest::Approx(1.0 - p).epsilon(1e-8));
      }
    }
  }
  CHECK_THROWS_AS(conditional_quantile_exact(ImsDistribution(ExponentFamily::smith(1.0)), 1.5, 1.0),
                  DomainError);
}

TEST_CASE("Marshall-Olkin quantile at the jump is the generalized inverse") {
  // V(1, t) = max(1, 1/t) + alpha min(1, 1/t); the conditional law of Y given
  // X = x jumps at y = x.
  const ImsDistribution d(ExponentFamily::marshall_olkin(0.5));
  const double x = 3.0;
  const double below = conditional_survivor(d, x * (1 - 1e-9), x);
  const double above = conditional_survivor(d, x * (1 + 1e-9), x);
  REQUIRE(below > above + 0.05);
  const double p_mid = 1.0 - 0.5 * (below + above);
  CHECK(conditional_quantile_exact(d, p_mid, x) == doctest::Approx(x).epsilon(1e-8));
}

TEST_CASE("exceedance conditional survivor") {
  const ImsDistribution d(ExponentFamily::schlather(0.3));
  const double u = 2.0, y = 1.5;
  CHECK(exceedance_conditional_survivor(d, y, u) ==
        doctest::Approx(joint_survivor(d, u, y) / std::exp(-u)).epsilon(1e-13));
}

TEST_CASE("margins") {
  const auto p = MarginSpec::pareto(2.0);
  CHECK(p.to_exponential(10.0) == doctest::Approx(2.0 * std::log(10.0)));
  CHECK(p.from_exponential(p.to_exponential(3.7)) == doctest::Approx(3.7));
  const auto fr = MarginSpec::unit_frechet();
  // H(y) = exp(-1/y)
  CHECK(fr.to_exponential(2.0) == doctest::Approx(-std::log1p(-std::exp(-0.5))));
  CHECK(fr.from_exponential(fr.to_exponential(0.8)) == doctest::Approx(0.8));

  const auto e = MarginSpec::empirical({4.0, 1.0, 2.0, 3.0});
  // (value_i, i / 5)
  CHECK(e.to_exponential(2.0) == doctest::Approx(-std::log(1 - 0.4)));
  CHECK(e.to_exponential(2.5) == doctest::Approx(-std::log(1 - 0.5)));
  CHECK(e.from_exponential(-std::log(1 - 0.6)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(MarginSpec::empirical({1.0}), DataError);
  CHECK_THROWS_AS(MarginSpec::empirical({1.0, 1.0, 2.0}), DataError);

  const std::vector<Pair> s{{0.5, 1.0}, {2.0, 0.1}};
  const auto t = transform_margins(s, p, fr);
  const auto back = to_exponential_margins(t, p, fr);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].first == doctest::Approx(s[i].first));
    CHECK(back[i].second == doctest::Approx(s[i].second));
  }
}

TEST_CASE("sub-asymptotic chi and eta") {
  const double a = 0.7;
  const ImsDistribution d(ExponentFamily::logistic(a));
  const auto rows = chi_bar_diagnostics(d, {0.9, 0.99, 0.999999});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.q == doctest::Approx(-std::log(1 - r.p)));
    CHECK(r.eta == doctest::Approx(std::pow(2.0, -a)).epsilon(1e-10));
    CHECK(r.chi == doctest::Approx(r.joint / (1 - r.p)).epsilon(1e-10));
  }
  CHECK(rows[2].chi < rows[0].chi);
  CHECK_THROWS_AS(chi_bar_diagnostics(d, {1.0}), DomainError);
}
