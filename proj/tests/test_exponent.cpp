#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "invms/error.hpp"
#include "invms/exponent.hpp"
#include "invms/numerics.hpp"
#include "invms/verify.hpp"

using namespace invms;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// V(x, y) = int max(w / x, (1 - w) / y) dH(w), from the density and atoms.
double v_from_spectral(const ExponentFamily& f, double x, double y) {
  const auto sup = f.support();
  const double kink = x / (x + y);
  QuadratureSpec q;
  q.abs_tol = 1e-13;
  q.rel_tol = 1e-11;
  q.max_subdivisions = 5000;
  const auto g = [&](double w) { return std::max(w / x, (1.0 - w) / y) * spectral_density(f, w); };
  double total = 0.0;
  const double lo = sup.lower, hi = sup.upper;
  if (kink > lo && kink < hi) {
    total += integrate(g, lo, kink, q).value + integrate(g, kink, hi, q).value;
  } else if (hi > lo) {
    total += integrate(g, lo, hi, q).value;
  }
  const auto at = f.endpoint_atoms();
  total += at.lower * std::max(lo / x, (1.0 - lo) / y);
  total += at.upper * std::max(hi / x, (1.0 - hi) / y);
  for (const auto& ia : f.interior_atoms())
    total += ia.mass * std::max(ia.w / x, (1.0 - ia.w) / y);
  return total;
}

}  // namespace

TEST_CASE("closed-form exponent measures") {
  const double x = 1.0, y = 2.0;
  SUBCASE("logistic") {
    const double a = 0.6;
    const auto f = ExponentFamily::logistic(a);
    CHECK(v(f, x, y) ==
          doctest::Approx(std::pow(std::pow(x, -1 / a) + std::pow(y, -1 / a), a)).epsilon(1e-13));
    CHECK(eta(f) == doctest::Approx(std::pow(2.0, -a)).epsilon(1e-13));
  }
  SUBCASE("smith, scipy reference") {
    const auto f = ExponentFamily::smith(1.3);
    CHECK(v(f, x, y) == doctest::Approx(1.154880417577632).epsilon(1e-13));
    CHECK(eta(f) == doctest::Approx(0.673714720464408).epsilon(1e-13));
    CHECK(eta(f) == doctest::Approx(1.0 / (2.0 * phi(0.65))).epsilon(1e-13));
  }
  SUBCASE("schlather") {
    const double r = 0.3;
    const auto f = ExponentFamily::schlather(r);
    const double expect =
        0.5 * (1 / x + 1 / y) * (1 + std::sqrt(1 - 2 * (r + 1) * x * y / ((x + y) * (x + y))));
    CHECK(v(f, x, y) == doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("extremal t, scipy reference") {
    const auto f = ExponentFamily::extremal_t(2.0, 0.5);
    CHECK(v(f, 1.0, 2.0) == doctest::Approx(1.240897879402485).epsilon(1e-11));
    CHECK(v(f, 0.7, 0.3) == doctest::Approx(3.9864689925510937).epsilon(1e-11));
  }
  SUBCASE("mixed logistic") {
    const auto f = ExponentFamily::mixed_logistic(0.4);
    CHECK(v(f, x, y) == doctest::Approx(1 / x + 1 / y - 0.4 / (x + y)).epsilon(1e-14));
  }
  SUBCASE("asymmetric logistic") {
    const double t = 0.4, p = 0.7, a = 0.5;
    const auto f = ExponentFamily::asymmetric_logistic(t, p, a);
    const double expect = (1 - t) / x + (1 - p) / y +
                          std::pow(std::pow(t / x, 1 / a) + std::pow(p / y, 1 / a), a);
    CHECK(v(f, x, y) == doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("independence and complete dependence") {
    CHECK(v(ExponentFamily::logistic(1.0), x, y) == doctest::Approx(1 / x + 1 / y));
    CHECK(v(ExponentFamily::marshall_olkin(1.0), x, y) == doctest::Approx(1 / x + 1 / y));
    CHECK(v(ExponentFamily::marshall_olkin(0.0), x, y) == doctest::Approx(std::max(1 / x, 1 / y)));
    CHECK(validate(ExponentFamily::marshall_olkin(0.0)).degenerate);
  }
}

TEST_CASE("exponent measure agrees with its spectral representation") {
  const std::vector<std::pair<double, double>> pts{{1.0, 1.0}, {0.5, 3.0}, {4.0, 0.2}};
  for (const auto& f : catalog_representatives()) {
    CAPTURE(to_spec_string(f));
    for (const auto& [x, y] : pts) {
      CAPTURE(x);
      CAPTURE(y);
      CHECK(v(f, x, y) == doctest::Approx(v_from_spectral(f, x, y)).epsilon(1e-7));
    }
  }
}

TEST_CASE("V is homogeneous of order -1 and V1 matches finite differences") {
  for (const auto& f : catalog_settings()) {
    CAPTURE(to_spec_string(f));
    for (const auto& [x, y] : std::vector<std::pair<double, double>>{{1.0, 2.5}, {3.0, 0.4}}) {
      CHECK(v(f, 2.0 * x, 2.0 * y) == doctest::Approx(0.5 * v(f, x, y)).epsilon(1e-10));
      const double h = 1e-5 * x;
      const double fd = (v(f, x + h, y) - v(f, x - h, y)) / (2 * h);
      CHECK(v1(f, x, y) == doctest::Approx(fd).epsilon(1e-5));
    }
    CHECK(v(f, 1.0, INFINITY) == doctest::Approx(1.0));
    CHECK(v(f, 1.0, 1.0) >= 1.0 - 1e-12);
    CHECK(v(f, 1.0, 1.0) <= 2.0 + 1e-12);
  }
}

TEST_CASE("every catalog setting satisfies the spectral constraints") {
  for (const auto& f : catalog_settings()) {
    CAPTURE(to_spec_string(f));
    const auto r = validate(f);
    CHECK(r.pass);
    CHECK(r.mass_violation <= 1e-6);
    CHECK(r.moment_violation <= 1e-6);
  }
}

TEST_CASE("custom densities are validated, not normalized") {
  // h = 2 on (0, 1): mass 2, moment 1
  const auto ok = ExponentFamily::from_density([](double) { return 2.0; }, {}, {});
  CHECK(validate(ok).pass);
  const auto bad = ExponentFamily::from_density([](double w) { return 3.0 * w; }, {}, {});
  const auto r = validate(bad);
  CHECK_FALSE(r.pass);
  CHECK(r.total_mass == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("gamma-varying normalizing constant, scipy reference") {
  CHECK(gamma_varying_tail_constant(ExponentFamily::gamma_varying(1, 1, 0)) ==
        doctest::Approx(284.50075155419177).epsilon(1e-8));
  CHECK(gamma_varying_tail_constant(ExponentFamily::gamma_varying(0.5, 2, 1)) ==
        doctest::Approx(5210.499941955711).epsilon(1e-8));
  CHECK_THROWS_AS(gamma_varying_tail_constant(ExponentFamily::smith(1.0)), DomainError);
}

TEST_CASE("atoms") {
  const auto s = ExponentFamily::schlather(0.2);
  CHECK(atom_masses(s).lower == doctest::Approx(gaussian_gaussian_atom(0.2)));
  CHECK(gaussian_gaussian_atom(0.2) == doctest::Approx(0.4));
  const auto al = ExponentFamily::asymmetric_logistic(0.4, 0.7, 0.5);
  CHECK(atom_masses(al).lower == doctest::Approx(0.3));
  CHECK(atom_masses(al).upper == doctest::Approx(0.6));
  const auto mo = ExponentFamily::marshall_olkin(0.6);
  REQUIRE(mo.interior_atoms().size() == 1);
  CHECK(mo.interior_atoms()[0].w == doctest::Approx(0.5));
  CHECK_THROWS_AS(v1(mo, 1.0, 1.0), BoundaryError);
  CHECK(atom_masses(ExponentFamily::smith(1.0)).lower == 0.0);
}

TEST_CASE("parameter domains") {
  CHECK_THROWS_AS(ExponentFamily::smith(0.0), DomainError);
  CHECK_THROWS_AS(ExponentFamily::schlather(1.0), DomainError);
  CHECK_THROWS_AS(ExponentFamily::logistic(0.0), DomainError);
  CHECK_THROWS_AS(ExponentFamily::logistic(1.5), DomainError);
  CHECK_THROWS_AS(ExponentFamily::asymmetric_mixed(0.9, 0.2), DomainError);
  CHECK_THROWS_AS(ExponentFamily::gamma_varying(-1, 1, 0), DomainError);
  CHECK_THROWS_AS(v(ExponentFamily::smith(1.0), -1.0, 1.0), DomainError);
}

TEST_CASE("family descriptors and JSON round-trip") {
  for (const auto& f : catalog_settings()) {
    const auto s = to_spec_string(f);
    CAPTURE(s);
    const auto g = parse_family(s);
    CHECK(to_spec_string(g) == s);
    CHECK(v(g, 0.7, 1.9) == v(f, 0.7, 1.9));
    const auto h = family_from_json(to_json(f));
    CHECK(to_spec_string(h) == s);
  }
  CHECK(to_spec_string(parse_family("family=smith, lambda=0.3")) == "family=smith lambda=0.3");
  CHECK(parse_family("lambda=2 family=smith").param("lambda") == 2.0);
  CHECK_THROWS_AS(parse_family("family=nosuch"), ParseError);
  CHECK_THROWS_AS(parse_family("family=smith"), ParseError);
  CHECK_THROWS_AS(parse_family("family=smith lambda=abc"), ParseError);
  CHECK_THROWS_AS(parse_family("family=smith lambda=1 rho=0.2"), ParseError);
  CHECK_THROWS_AS(family_from_json("{\"params\": {}}"), ParseError);
}
