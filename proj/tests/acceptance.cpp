// Acceptance gate: one line per criterion, "ACCEPTANCE <n> PASS|FAIL <what>",
// followed by the failing checks. Exit status is nonzero if any criterion fails.
//
// usage: acceptance <path to invms-cli>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "invms/invms.h"

namespace {

using Json = nlohmann::json;

struct Criterion {
  int id;
  const char* suite;
  const char* what;
};

const Criterion kSuites[] = {
    {1, "fig2", "Smith quantile study: averaged curves vs exact, canonical vs smith medians"},
    {2, "eta", "eta = 1/V(1,1) vs diagonal slope over q in [10, 30]"},
    {3, "moment", "spectral mass 2 and moment constraint within 1e-6"},
    {4, "lemma1", "V1 limit along the end-point approach path"},
    {5, "convergence", "sup-distance to the limit law decreasing, rate-scaled stability"},
    {6, "sampler", "joint survivor within 4 SE and AD margins"},
    {7, "variation", "slow variation, Gamma variation, integral expansion"},
};

std::string fmt(const Json& v) {
  if (v.is_null()) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v.get<double>());
  return buf;
}

bool run_suite(const Criterion& c) {
  char* out = nullptr;
  int pass = 0;
  if (invms_verify(c.suite, nullptr, &out, &pass) != INVMS_OK) {
    std::printf("ACCEPTANCE %d FAIL %s (error: %s)\n", c.id, c.what, invms_last_error());
    return false;
  }
  const Json j = Json::parse(out);
  invms_string_free(out);
  std::size_t total = 0, failed = 0;
  for (const auto& s : j["suites"]) {
    for (const auto& ch : s["checks"]) {
      ++total;
      failed += !ch["pass"].get<bool>();
    }
  }
  std::printf("ACCEPTANCE %d %s %s [%zu/%zu checks]\n", c.id, pass ? "PASS" : "FAIL", c.what,
              total - failed, total);
  for (const auto& s : j["suites"]) {
    for (const auto& ch : s["checks"]) {
      if (ch["pass"].get<bool>()) continue;
      std::printf("    failed: %s value=%s threshold=%s %s\n", ch["name"].get<std::string>().c_str(),
                  fmt(ch["value"]).c_str(), fmt(ch["threshold"]).c_str(),
                  ch["detail"].get<std::string>().c_str());
    }
  }
  std::fflush(stdout);
  return pass == 1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// Each stochastic command twice with the same seed; outputs must match byte for byte.
bool determinism(const std::string& cli) {
  struct Cmd {
    std::string name, args;
    int expect;
  };
  const std::vector<Cmd> cmds{
      {"simulate", "simulate --family extremalt --nu 2 --rho 0.5 --n 5000 --seed 31", 0},
      {"fig2", "fig2 --lambda 0.3,1.3 --reps 3 --n 1000 --seed 31", 0},
      {"verify-sampler", "verify --suite sampler --reps 3 --seed 31", -1},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cmds) {
    std::string body[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const std::string path = "acceptance_" + c.name + "_" + std::to_string(k) + ".out";
      const int code = shell("'" + cli + "' " + c.args + " -o " + path + " 2>/dev/null");
      if (c.expect >= 0 && code != c.expect) ran = false;
      body[k] = slurp(path);
    }
    const bool same = ran && !body[0].empty() && body[0] == body[1];
    ok = ok && same;
    detail += " " + c.name + (same ? "=identical" : "=DIFFERENT");
  }
  std::printf("ACCEPTANCE 8 %s byte-reproducible stochastic commands:%s\n", ok ? "PASS" : "FAIL",
              detail.c_str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <path to invms-cli>\n");
    return 2;
  }
  int failures = 0;
  for (const auto& c : kSuites) failures += !run_suite(c);
  failures += !determinism(argv[1]);
  std::printf("ACCEPTANCE SUMMARY %d/8 passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
