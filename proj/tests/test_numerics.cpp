#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "invms/error.hpp"
#include "invms/numerics.hpp"
#include "invms/sample_stats.hpp"

using namespace invms;

// Reference values below are from scipy.stats / scipy.special.

TEST_CASE("normal distribution functions") {
  CHECK(std_normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(std_normal_sf(8.0) == doctest::Approx(6.22096057427174e-16).epsilon(1e-12));
  CHECK(log_std_normal_cdf(-30.0) == doctest::Approx(-454.32124395634327).epsilon(1e-13));
  CHECK(std_normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
  CHECK(std_normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
  for (double p : {1e-300, 1e-8, 0.01, 0.3, 0.5, 0.77, 0.999999}) {
    CHECK(std_normal_cdf(std_normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(std_normal_cdf(0.3) + std_normal_sf(0.3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("incomplete beta and Student t") {
  CHECK(incomplete_beta(2.5, 3.5, 0.3) == doctest::Approx(0.29675298929566646).epsilon(1e-12));
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(student_t_cdf(-1.7, 3.5) == doctest::Approx(0.08724036647536386).epsilon(1e-11));
  CHECK(student_t_quantile(0.975, 4.0) == doctest::Approx(2.7764451051977987).epsilon(1e-10));
  CHECK(student_t_pdf(0.7, 2.2) == doctest::Approx(0.25896895722426255).epsilon(1e-12));
  CHECK(student_t_cdf(0.0, 7.0) == doctest::Approx(0.5));
}

TEST_CASE("adaptive quadrature") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  // integrable endpoint singularity
  const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-9));
  const auto e = integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0);
  CHECK(e.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));
  CHECK(gauss_kronrod21([](double x) { return x * x * x; }, 0.0, 2.0) ==
        doctest::Approx(4.0).epsilon(1e-14));
  QuadratureSpec bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, bad), DomainError);
  QuadratureSpec tight;
  tight.max_subdivisions = 1;
  tight.abs_tol = 1e-300;
  tight.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, tight),
                  ConvergenceError);
}

TEST_CASE("Brent root finding") {
  const double r = find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), BracketError);
}

TEST_CASE("Nelder-Mead on Rosenbrock") {
  const auto rosen = [](std::span<const double> p) {
    return 100.0 * std::pow(p[1] - p[0] * p[0], 2) + std::pow(1.0 - p[0], 2);
  };
  const std::vector<double> init{-1.2, 1.0}, scale{0.5, 0.5};
  const auto r = minimize(rosen, init, scale);
  CHECK(r.converged);
  CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.point[1] == doctest::Approx(1.0).epsilon(1e-4));
  // non-finite values act as +inf barriers
  const auto barrier = [](std::span<const double> p) {
    return p[0] < 0.5 ? NAN : (p[0] - 1.0) * (p[0] - 1.0);
  };
  const std::vector<double> i1{2.0}, s1{0.3};
  CHECK(minimize(barrier, i1, s1).point[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("random streams are reproducible and distinct") {
  RandomStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 3000);
  RandomStream u(7, 3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sample statistics") {
  const std::vector<double> x{3.0, 1.0, 4.0, 1.0, 5.0};
  // type-7: h = (n-1)p, sorted {1,1,3,4,5}
  CHECK(empirical_quantile(x, 0.5) == doctest::Approx(3.0));
  CHECK(empirical_quantile(x, 0.1) == doctest::Approx(1.0));
  CHECK(empirical_quantile(x, 0.9) == doctest::Approx(4.6));
  CHECK(mean(x) == doctest::Approx(2.8));
  CHECK(sample_sd(x) == doctest::Approx(std::sqrt(3.2)));
  const auto r = ranks(x);
  CHECK(r == std::vector<double>{3.0, 1.5, 4.0, 1.5, 5.0});
  const std::vector<double> y{6.0, 2.0, 8.0, 2.0, 10.0};
  CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
  CHECK(spearman_correlation(x, y) == doctest::Approx(1.0));
  CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), StateError);
}

TEST_CASE("goodness of fit statistics") {
  RandomStream s(11, 0);
  std::vector<double> e;
  for (int i = 0; i < 2000; ++i) e.push_back(s.exponential());
  const auto cdf = [](double v) { return v <= 0 ? 0.0 : 1.0 - std::exp(-v); };
  CHECK(anderson_darling(e, cdf) < kAndersonDarlingCritical1pct);
  CHECK(kolmogorov_smirnov(e, cdf) < 1.63 / std::sqrt(2000.0));
  const auto wrong = [](double v) { return v <= 0 ? 0.0 : 1.0 - std::exp(-2.0 * v); };
  CHECK(anderson_darling(e, wrong) > kAndersonDarlingCritical1pct);
}
