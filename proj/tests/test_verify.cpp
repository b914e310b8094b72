#include <doctest.h>

#include <json.hpp>

#include "invms/error.hpp"
#include "invms/verify.hpp"

using namespace invms;

TEST_CASE("catalog coverage") {
  CHECK(catalog_settings().size() == 27);
  CHECK(catalog_representatives().size() == 9);
  CHECK(suite_names() == std::vector<std::string>{"moment", "eta", "lemma1", "convergence",
                                                  "variation", "sampler", "fig2"});
  CHECK_THROWS_AS(run_suite("nosuch"), DomainError);
}

TEST_CASE("deterministic suites report every check") {
  for (const char* name : {"moment", "eta", "lemma1"}) {
    CAPTURE(name);
    const auto r = run_suite(name);
    CHECK(r.suite == name);
    CHECK_FALSE(r.checks.empty());
    CHECK(r.pass);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("stochastic suite is reproducible") {
  VerifyOptions o;
  o.sampler_reps = 2;
  o.sampler_n = 300;
  const auto a = suites_to_json({run_suite("sampler", o)});
  const auto b = suites_to_json({run_suite("sampler", o)});
  CHECK(a == b);
  const auto j = nlohmann::json::parse(a);
  CHECK(j.contains("all_pass"));
  REQUIRE(j["suites"].size() == 1);
  const auto& s = j["suites"][0];
  CHECK(s["suite"] == "sampler");
  for (const auto& c : s["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("pass"));
    CHECK(c.contains("value"));
    CHECK(c.contains("threshold"));
  }
}
