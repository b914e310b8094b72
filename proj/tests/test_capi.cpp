#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "invms/invms.h"

namespace {

struct Family {
  invms_family* f = nullptr;
  explicit Family(const char* desc) { REQUIRE(invms_family_parse(desc, &f) == INVMS_OK); }
  ~Family() { invms_family_free(f); }
};

std::string take(char* s) {
  std::string out(s);
  invms_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status reporting") {
  invms_family* f = nullptr;
  CHECK(invms_family_parse("family=smith lambda=-1", &f) == INVMS_E_DOMAIN);
  CHECK(f == nullptr);
  CHECK(std::string(invms_last_error()).find("lambda") != std::string::npos);
  CHECK(invms_family_parse("family=bogus", &f) == INVMS_E_PARSE);
  CHECK(invms_family_parse(nullptr, &f) == INVMS_E_NULL);
  CHECK(invms_family_from_json("{not json", &f) == INVMS_E_PARSE);
  CHECK(std::string(invms_status_name(INVMS_E_DATA)) != "");
  CHECK(std::string(invms_version()) != "");
  invms_family_free(nullptr);
  invms_fit_free(nullptr);
  invms_string_free(nullptr);
}

TEST_CASE("family functions") {
  Family fam("family=logistic alpha=0.5");
  double out = 0.0;
  REQUIRE(invms_v(fam.f, 1.0, 1.0, &out) == INVMS_OK);
  CHECK(out == doctest::Approx(std::sqrt(2.0)));
  REQUIRE(invms_eta(fam.f, &out) == INVMS_OK);
  CHECK(out == doctest::Approx(1 / std::sqrt(2.0)));
  REQUIRE(invms_v1(fam.f, 1.0, 1.0, &out) == INVMS_OK);
  CHECK(out == doctest::Approx(-std::pow(2.0, -0.5)));
  CHECK(invms_v(fam.f, -1.0, 1.0, &out) == INVMS_E_DOMAIN);
  double lo = -1, hi = -1;
  REQUIRE(invms_atom_masses(fam.f, &lo, &hi) == INVMS_OK);
  CHECK(lo == 0.0);
  CHECK(hi == 0.0);

  char* s = nullptr;
  REQUIRE(invms_family_spec(fam.f, &s) == INVMS_OK);
  CHECK(take(s) == "family=logistic alpha=0.5");
  REQUIRE(invms_family_to_json(fam.f, &s) == INVMS_OK);
  const std::string js = take(s);
  invms_family* g = nullptr;
  REQUIRE(invms_family_from_json(js.c_str(), &g) == INVMS_OK);
  double vg = 0;
  invms_v(g, 0.3, 2.0, &vg);
  invms_v(fam.f, 0.3, 2.0, &out);
  CHECK(vg == out);
  invms_family_free(g);

  int pass = 0;
  REQUIRE(invms_validate(fam.f, 1e-6, &s, &pass) == INVMS_OK);
  CHECK(pass == 1);
  CHECK(take(s).find("total_mass") != std::string::npos);
}

TEST_CASE("conditional law, norming and limit") {
  Family fam("family=schlather rho=0");
  double s = 0, q = 0;
  REQUIRE(invms_conditional_quantile(fam.f, 0.5, 4.0, &q) == INVMS_OK);
  REQUIRE(invms_conditional_survivor(fam.f, q, 4.0, &s) == INVMS_OK);
  CHECK(s == doctest::Approx(0.5));
  double js = 0;
  REQUIRE(invms_joint_survivor(fam.f, 0.0, 1.0, &js) == INVMS_OK);
  CHECK(js == doctest::Approx(std::exp(-1.0)));
  double a = 0, b = 0;
  const char* kind = nullptr;
  REQUIRE(invms_norming(fam.f, 10.0, &a, &b, &kind) == INVMS_OK);
  CHECK(a == 0.0);
  CHECK(b == 1.0);
  CHECK(kind != nullptr);
  double atom = -1, c = 0, z = 0;
  REQUIRE(invms_limit_atom(fam.f, &atom) == INVMS_OK);
  CHECK(atom == 0.0);
  REQUIRE(invms_limit_quantile(fam.f, 0.3, &z) == INVMS_OK);
  REQUIRE(invms_limit_cdf(fam.f, z, &c) == INVMS_OK);
  CHECK(c == doctest::Approx(0.3));
  double d = 0, zs = 0;
  REQUIRE(invms_convergence_distance(fam.f, 20.0, &d, &zs) == INVMS_OK);
  CHECK(d < 0.05);
  Family mo("family=marshallolkin alpha=0.5");
  CHECK(invms_conditional_survivor(mo.f, 2.0, 2.0, &s) == INVMS_E_BOUNDARY);
}

TEST_CASE("sample, CSV and fit") {
  Family fam("family=smith lambda=1.3");
  const std::size_t n = 3000;
  std::vector<double> xs(n), ys(n), xs2(n), ys2(n);
  REQUIRE(invms_sample(fam.f, n, 12, 0, xs.data(), ys.data()) == INVMS_OK);
  REQUIRE(invms_sample(fam.f, n, 12, 0, xs2.data(), ys2.data()) == INVMS_OK);
  CHECK(xs == xs2);
  CHECK(ys == ys2);

  char* csv = nullptr;
  REQUIRE(invms_csv_format(xs.data(), ys.data(), n, &csv) == INVMS_OK);
  double* px = nullptr;
  double* py = nullptr;
  std::size_t m = 0;
  REQUIRE(invms_csv_parse(csv, &px, &py, &m) == INVMS_OK);
  invms_string_free(csv);
  REQUIRE(m == n);
  for (std::size_t i = 0; i < n; i += 97) CHECK(px[i] == doctest::Approx(xs[i]).epsilon(1e-14));
  invms_buffer_free(px);
  invms_buffer_free(py);
  CHECK(invms_csv_parse("x,y\n1,oops\n", &px, &py, &m) == INVMS_E_DATA);

  invms_fit* fit = nullptr;
  REQUIRE(invms_fit_create(xs.data(), ys.data(), n, "canonical", 0.935, 0, &fit) == INVMS_OK);
  int conv = 0;
  REQUIRE(invms_fit_converged(fit, &conv) == INVMS_OK);
  CHECK(conv == 1);
  double u = 0;
  REQUIRE(invms_fit_threshold(fit, &u) == INVMS_OK);
  CHECK(u == doctest::Approx(-std::log(0.065)));
  std::size_t k = 0;
  REQUIRE(invms_fit_residual_count(fit, &k) == INVMS_OK);
  std::vector<double> rx(k), ry(k), rr(k);
  REQUIRE(invms_fit_residuals(fit, rx.data(), ry.data(), rr.data()) == INVMS_OK);
  for (double x : rx) CHECK(x > u);
  double q1 = 0, q2 = 0;
  REQUIRE(invms_fit_quantile(fit, 0.1, 5.0, &q1) == INVMS_OK);
  REQUIRE(invms_fit_quantile(fit, 0.9, 5.0, &q2) == INVMS_OK);
  CHECK(q1 < q2);
  CHECK(invms_fit_quantile(fit, 0.5, 0.1, &q1) == INVMS_E_DOMAIN);
  char* js = nullptr;
  REQUIRE(invms_fit_to_json(fit, &js) == INVMS_OK);
  CHECK(take(js).find("\"residual_quantiles\"") != std::string::npos);
  invms_fit_free(fit);

  CHECK(invms_fit_create(xs.data(), ys.data(), 50, "canonical", 0.935, 0, &fit) == INVMS_E_DATA);
  CHECK(invms_fit_create(xs.data(), ys.data(), n, "other", 0.935, 0, &fit) == INVMS_E_PARSE);
  CHECK(invms_fit_create(xs.data(), ys.data(), n, "canonical", 1.5, 0, &fit) == INVMS_E_DOMAIN);
}

TEST_CASE("study and verification entry points") {
  Family fam("family=smith lambda=0.3");
  char* out = nullptr;
  REQUIRE(invms_quantile_study(fam.f, "{\"reps\": 2, \"n\": 800, \"seed\": 3}", &out) == INVMS_OK);
  const std::string r = take(out);
  CHECK(r.find("\"averaged\"") != std::string::npos);
  CHECK(invms_quantile_study(fam.f, "{\"reps\": \"x\"}", &out) != INVMS_OK);

  int pass = 0;
  REQUIRE(invms_verify("eta", nullptr, &out, &pass) == INVMS_OK);
  CHECK(pass == 1);
  invms_string_free(out);
  CHECK(invms_verify("nope", nullptr, &out, &pass) == INVMS_E_DOMAIN);
}
