#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli() {
  const char* p = std::getenv("INVMS_CLI");
  REQUIRE_MESSAGE(p != nullptr, "INVMS_CLI must name the invms-cli binary");
  return p;
}

int run(const std::string& args) {
  const std::string cmd = "SOURCE_DATE_EPOCH=1700000000 '" + cli() + "' " + args + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("nosuch") == 2);
  CHECK(run("simulate --family smith --lambda 1 --n 10") == 2);  // seed is mandatory
  CHECK(run("simulate --family smith --lambda 0 --n 10 --seed 1") == 2);
  CHECK(run("simulate --family smith --lambda 1 --n 0 --seed 1") == 2);
  CHECK(run("simulate --family nosuch --n 10 --seed 1") == 2);
  CHECK(run("fit --in x.csv --threshold 1.2") == 2);
  CHECK(run("theory --family smith --lambda 1 --what other") == 2);
  CHECK(run("fig2 --reps 1") == 2);
  CHECK(run("--help > /dev/null") == 0);
}

TEST_CASE("simulate, fit and quantiles") {
  REQUIRE(run("simulate --family smith --lambda 1.3 --n 3000 --seed 5 -o cli_a.csv") == 0);
  REQUIRE(run("simulate --family 'family=smith lambda=1.3' --n 3000 --seed 5 -o cli_b.csv") == 0);
  const std::string a = slurp("cli_a.csv");
  CHECK(a == slurp("cli_b.csv"));
  CHECK(a.rfind("x,y\n", 0) == 0);
  REQUIRE(run("simulate --family smith --lambda 1.3 --n 3000 --seed 6 -o cli_c.csv") == 0);
  CHECK(a != slurp("cli_c.csv"));

  const auto m = nlohmann::json::parse(slurp("cli_a.csv.manifest.json"));
  CHECK(m["command"] == "simulate");
  CHECK(m["family"] == "family=smith lambda=1.3");
  CHECK(m["seeds"]["seed"] == 5);
  CHECK(m["timestamp"] == "2023-11-14T22:13:20Z");
  REQUIRE(m["outputs"].size() == 1);
  CHECK(m["outputs"][0]["bytes"] == a.size());
  CHECK(m["outputs"][0]["fnv1a64"].get<std::string>().size() == 16);

  REQUIRE(run("fit --in cli_a.csv --model smith -o cli_fit.json --residuals cli_res.csv") == 0);
  const auto f = nlohmann::json::parse(slurp("cli_fit.json"));
  CHECK(f["model"] == "smith");
  CHECK(f["estimates"].contains("lambda"));
  CHECK(f["stderr"].is_null());
  CHECK(slurp("cli_res.csv").rfind("x,y,residual\n", 0) == 0);
  const auto fm = nlohmann::json::parse(slurp("cli_fit.json.manifest.json"));
  CHECK(fm["outputs"].size() == 2);

  REQUIRE(run("quantiles --in cli_a.csv --grid-points 4 --family smith --lambda 1.3 -o cli_q.csv") ==
          0);
  const std::string q = slurp("cli_q.csv");
  CHECK(q.rfind("p,x,q,q_theory\n", 0) == 0);
  CHECK(std::count(q.begin(), q.end(), '\n') == 1 + 3 * 4);
}

TEST_CASE("data errors exit 3") {
  std::ofstream("cli_bad.csv") << "x,y\n1,2\n3\n";
  CHECK(run("fit --in cli_bad.csv") == 3);
  std::ofstream("cli_small.csv") << "x,y\n1,2\n3,4\n";
  CHECK(run("fit --in cli_small.csv") == 3);
  CHECK(run("fit --in cli_missing.csv") == 3);
}

TEST_CASE("theory tables") {
  REQUIRE(run("theory --family logistic --alpha 0.5 --what limit --points 11 -o cli_lim.csv") == 0);
  const std::string lim = slurp("cli_lim.csv");
  CHECK(lim.rfind("family,z,cdf\n", 0) == 0);
  CHECK(std::count(lim.begin(), lim.end(), '\n') == 12);
  REQUIRE(run("theory --family smith --lambda 0.5..2 --steps 4 --what convergence -o cli_conv.csv") ==
          0);
  const std::string conv = slurp("cli_conv.csv");
  CHECK(std::count(conv.begin(), conv.end(), '\n') == 1 + 4 * 3);
  CHECK(conv.find("family=smith lambda=2,") != std::string::npos);
  REQUIRE(run("theory --family schlather --rho 0.2 --points 5 -o cli_norm.csv") == 0);
  CHECK(slurp("cli_norm.csv").find(",p3\n") != std::string::npos);
}

TEST_CASE("verify exit status follows the checks") {
  CHECK(run("verify --suite eta -o cli_eta.json") == 0);
  const auto j = nlohmann::json::parse(slurp("cli_eta.json"));
  CHECK(j["all_pass"] == true);
}

TEST_CASE("fig2 is byte-reproducible") {
  const std::string args = "fig2 --lambda 1.3 --reps 2 --n 1000 --seed 9 -o ";
  REQUIRE(run(args + "cli_f1.csv") == 0);
  REQUIRE(run(args + "cli_f2.csv") == 0);
  const std::string a = slurp("cli_f1.csv");
  CHECK(a == slurp("cli_f2.csv"));
  CHECK(a.rfind("lambda,series,p,x,q\n", 0) == 0);
  CHECK(a.find(",theory,") != std::string::npos);
  CHECK(a.find(",canonical,") != std::string::npos);
  CHECK(a.find(",smith,") != std::string::npos);
}
