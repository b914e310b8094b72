// invms-cli: command-line front end to the invms C API. Every file written is
// listed, with its FNV-1a hash, in a JSON manifest next to the primary output.
//
// Exit codes: 0 success, 1 verification checks failed, 2 usage or domain
// error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invms/invms.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(invms_status s) {
  switch (s) {
    case INVMS_OK: return 0;
    case INVMS_E_DOMAIN:
    case INVMS_E_PARSE:
    case INVMS_E_UNSUPPORTED:
    case INVMS_E_NULL: return kExitUsage;
    case INVMS_E_DATA: return kExitData;
    default: return kExitNumeric;
  }
}

void check(invms_status s) {
  if (s != INVMS_OK) throw CliError{exit_code_for(s), invms_last_error()};
}

std::string take(char* s) {
  std::string out(s ? s : "");
  invms_string_free(s);
  return out;
}

struct FamilyDeleter {
  void operator()(invms_family* f) const { invms_family_free(f); }
};
struct FitDeleter {
  void operator()(invms_fit* f) const { invms_fit_free(f); }
};
using FamilyPtr = std::unique_ptr<invms_family, FamilyDeleter>;
using FitPtr = std::unique_ptr<invms_fit, FitDeleter>;

FamilyPtr parse_family(const std::string& desc) {
  invms_family* f = nullptr;
  check(invms_family_parse(desc.c_str(), &f));
  return FamilyPtr(f);
}

std::string family_spec(const invms_family* f) {
  char* s = nullptr;
  check(invms_family_spec(f, &s));
  return take(s);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(e, &end, 10);
    if (end != e && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitData, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Collects outputs and writes the manifest.
class Run {
 public:
  Run(std::string command, int argc, char** argv) : command_(std::move(command)) {
    for (int i = 0; i < argc; ++i) argv_.emplace_back(argv[i]);
  }

  Json& info() { return info_; }

  // Empty path: stdout, not listed in the manifest.
  void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
      std::cout << content;
      std::cout.flush();
      return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{kExitUsage, "cannot write '" + path + "'"};
    out << content;
    out.close();
    if (!out) throw CliError{kExitUsage, "failed writing '" + path + "'"};
    Json o;
    o["path"] = path;
    o["bytes"] = content.size();
    o["fnv1a64"] = hex64(fnv1a64(content));
    outputs_.push_back(std::move(o));
    if (manifest_path_.empty()) manifest_path_ = path + ".manifest.json";
  }

  void set_manifest_path(const std::string& p) {
    if (!p.empty()) manifest_path_ = p;
  }

  void write_manifest() const {
    if (manifest_path_.empty()) return;
    Json m;
    m["tool"] = "invms-cli";
    m["version"] = invms_version();
    m["command"] = command_;
    m["argv"] = argv_;
    for (const auto& [k, v] : info_.items()) m[k] = v;
    m["outputs"] = outputs_;
    m["timestamp"] = timestamp_utc();
    std::ofstream out(manifest_path_, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{kExitUsage, "cannot write manifest '" + manifest_path_ + "'"};
    out << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  Json info_ = Json::object();
  Json outputs_ = Json::array();
  std::string manifest_path_;
};

// ---------------------------------------------------------------------------
// Family options shared by several subcommands.

const char* const kParamNames[] = {"lambda", "rho", "nu", "theta", "phi",
                                   "alpha",  "gamma", "kappa", "delta"};

struct FamilyOptions {
  std::string family;
  std::map<std::string, std::string> params;

  void attach(CLI::App* app) {
    app->add_option("--family", family,
                    "family name (smith, schlather, extremalt, mixedlogistic, asymmetriclogistic, "
                    "asymmetricmixed, marshallolkin, logistic, gammavarying) or a full "
                    "descriptor such as 'family=smith lambda=1.3'");
    for (const char* name : kParamNames)
      app->add_option(std::string("--") + name, params[name], std::string("parameter ") + name);
  }

  bool given() const { return !family.empty(); }

  // Descriptor text with parameter `sweep` replaced by `value`.
  std::string build(const std::string& sweep = "", double value = 0.0) const {
    if (family.empty()) throw CliError{kExitUsage, "--family is required"};
    std::string out = family.find('=') == std::string::npos ? "family=" + family : family;
    for (const auto& [k, v] : params) {
      if (v.empty()) continue;
      out += " " + k + "=" + (k == sweep ? num(value) : v);
    }
    return out;
  }

  // The parameter given as lo..hi, if any.
  std::optional<std::pair<std::string, std::pair<double, double>>> range() const {
    for (const auto& [k, v] : params) {
      const auto dots = v.find("..");
      if (dots == std::string::npos) continue;
      try {
        std::size_t u1 = 0, u2 = 0;
        const std::string a = v.substr(0, dots), b = v.substr(dots + 2);
        const double lo = std::stod(a, &u1), hi = std::stod(b, &u2);
        if (u1 != a.size() || u2 != b.size() || !(hi > lo)) throw std::invalid_argument(v);
        return std::pair{k, std::pair{lo, hi}};
      } catch (const std::exception&) {
        throw CliError{kExitUsage, "--" + k + ": expected lo..hi with lo < hi, got '" + v + "'"};
      }
    }
    return std::nullopt;
  }
};

CLI::Validator open_unit() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double v = std::stod(s);
          if (v > 0.0 && v < 1.0) return {};
        } catch (const std::exception&) {
        }
        return "value must lie strictly between 0 and 1, got " + s;
      },
      "(0,1)");
}

std::vector<double> midpoint_grid(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * (i + 0.5) / points);
  return g;
}

struct Data {
  std::vector<double> xs, ys;
};

Data load_csv(const std::string& path) {
  const std::string text = read_file(path);
  double* xs = nullptr;
  double* ys = nullptr;
  std::size_t n = 0;
  check(invms_csv_parse(text.c_str(), &xs, &ys, &n));
  Data d{std::vector<double>(xs, xs + n), std::vector<double>(ys, ys + n)};
  invms_buffer_free(xs);
  invms_buffer_free(ys);
  return d;
}

FitPtr make_fit(const Data& d, const std::string& model, double q, bool empirical) {
  invms_fit* f = nullptr;
  check(invms_fit_create(d.xs.data(), d.ys.data(), d.xs.size(), model.c_str(), q,
                         empirical ? 1 : 0, &f));
  return FitPtr(f);
}

// ---------------------------------------------------------------------------
// Subcommands

struct SimulateArgs {
  FamilyOptions fam;
  long long n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string out, manifest;
};

int cmd_simulate(const SimulateArgs& a, Run& run) {
  if (a.fam.range()) throw CliError{kExitUsage, "simulate takes single parameter values"};
  const auto fam = parse_family(a.fam.build());
  const auto n = static_cast<std::size_t>(a.n);
  std::vector<double> xs(n), ys(n);
  check(invms_sample(fam.get(), n, a.seed, a.stream, xs.data(), ys.data()));
  char* csv = nullptr;
  check(invms_csv_format(xs.data(), ys.data(), n, &csv));
  run.info()["family"] = family_spec(fam.get());
  run.info()["seeds"] = {{"seed", a.seed}, {"stream", a.stream}};
  run.info()["n"] = n;
  run.info()["margins"] = "unit exponential";
  run.set_manifest_path(a.manifest);
  run.emit(a.out, take(csv));
  return 0;
}

struct FitArgs {
  std::string in, model = "canonical";
  double threshold = 0.935;
  bool empirical = false;
  std::string out, residuals, manifest;
};

int cmd_fit(const FitArgs& a, Run& run) {
  const Data d = load_csv(a.in);
  const auto fit = make_fit(d, a.model, a.threshold, a.empirical);
  char* js = nullptr;
  check(invms_fit_to_json(fit.get(), &js));
  run.info()["input"] = a.in;
  run.info()["input_fnv1a64"] = hex64(fnv1a64(read_file(a.in)));
  run.info()["model"] = a.model;
  run.info()["thresholds"] = {{"quantile", a.threshold}, {"empirical", a.empirical}};
  run.info()["quantile_convention"] = "type7";
  run.set_manifest_path(a.manifest);
  run.emit(a.out, take(js) + "\n");
  if (!a.residuals.empty()) {
    std::size_t m = 0;
    check(invms_fit_residual_count(fit.get(), &m));
    std::vector<double> x(m), y(m), r(m);
    check(invms_fit_residuals(fit.get(), x.data(), y.data(), r.data()));
    std::string csv = "x,y,residual\n";
    for (std::size_t i = 0; i < m; ++i) csv += num(x[i]) + "," + num(y[i]) + "," + num(r[i]) + "\n";
    run.emit(a.residuals, csv);
  }
  return 0;
}

struct QuantilesArgs {
  FamilyOptions fam;
  std::string in, model = "canonical";
  double threshold = 0.935;
  bool empirical = false;
  std::vector<double> probs{0.025, 0.5, 0.975};
  int points = 50;
  double x_max = NAN;
  std::string out, manifest;
};

int cmd_quantiles(const QuantilesArgs& a, Run& run) {
  const Data d = load_csv(a.in);
  const auto fit = make_fit(d, a.model, a.threshold, a.empirical);
  double u = 0.0;
  check(invms_fit_threshold(fit.get(), &u));
  double top = a.x_max;
  if (std::isnan(top)) {
    top = u;
    for (double x : d.xs) top = std::max(top, x);
  }
  if (!(top > u)) throw CliError{kExitUsage, "--x-max must exceed the threshold " + num(u)};
  const auto grid = midpoint_grid(u, top, a.points);
  FamilyPtr fam;
  if (a.fam.given()) {
    if (a.fam.range()) throw CliError{kExitUsage, "quantiles takes single parameter values"};
    fam = parse_family(a.fam.build());
    run.info()["family"] = family_spec(fam.get());
  }
  std::string csv = fam ? "p,x,q,q_theory\n" : "p,x,q\n";
  for (double p : a.probs) {
    for (double x : grid) {
      double q = 0.0;
      check(invms_fit_quantile(fit.get(), p, x, &q));
      csv += num(p) + "," + num(x) + "," + num(q);
      if (fam) {
        double qt = 0.0;
        check(invms_conditional_quantile(fam.get(), p, x, &qt));
        csv += "," + num(qt);
      }
      csv += "\n";
    }
  }
  run.info()["input"] = a.in;
  run.info()["input_fnv1a64"] = hex64(fnv1a64(read_file(a.in)));
  run.info()["model"] = a.model;
  run.info()["thresholds"] = {{"quantile", a.threshold}, {"empirical", a.empirical}, {"u", u}};
  run.info()["quantile_convention"] = "type7";
  run.set_manifest_path(a.manifest);
  run.emit(a.out, csv);
  return 0;
}

struct TheoryArgs {
  FamilyOptions fam;
  std::string what = "norming";
  int steps = 25;
  int points = 200;
  std::string out, manifest;
};

const double kMarkerProbs[] = {0.95, 1.0 - 1e-7, 1.0 - 1e-13};

std::string theory_rows(const TheoryArgs& a, const invms_family* f) {
  const std::string desc = family_spec(f);
  std::string rows;
  if (a.what == "norming") {
    // x from the 0.87 exponential quantile to beyond the last marker.
    const double lo = -std::log(0.13), hi = 1.2 * -std::log(1e-13);
    std::vector<std::pair<double, std::string>> xs;
    for (int i = 0; i < a.points; ++i)
      xs.emplace_back(lo * std::pow(hi / lo, double(i) / (a.points - 1)), "");
    for (int k = 0; k < 3; ++k) xs.emplace_back(-std::log1p(-kMarkerProbs[k]), "p" + std::to_string(k + 1));
    for (const auto& [x, marker] : xs) {
      double av = 0.0, bv = 0.0;
      check(invms_norming(f, x, &av, &bv, nullptr));
      rows += desc + "," + num(x) + "," + num(av) + "," + num(bv) + "," + num(av / x) + "," +
              num(std::log(bv) / std::log(x)) + "," + marker + "\n";
    }
  } else if (a.what == "limit") {
    for (int i = 0; i < a.points; ++i) {
      const double p = 0.001 + 0.998 * i / (a.points - 1);
      double z = 0.0, c = 0.0;
      check(invms_limit_quantile(f, p, &z));
      check(invms_limit_cdf(f, z, &c));
      rows += desc + "," + num(z) + "," + num(c) + "\n";
    }
  } else {
    for (double p : kMarkerProbs) {
      const double u = -std::log1p(-p);
      double dist = 0.0, zs = 0.0;
      check(invms_convergence_distance(f, u, &dist, &zs));
      rows += desc + "," + num(p) + "," + num(u) + "," + num(dist) + "," + num(zs) + "\n";
    }
  }
  return rows;
}

int cmd_theory(const TheoryArgs& a, Run& run) {
  std::string csv;
  if (a.what == "norming") csv = "family,x,a,b,a_over_x,log_b_over_log_x,marker\n";
  else if (a.what == "limit") csv = "family,z,cdf\n";
  else csv = "family,p,u,distance,z_at_sup\n";
  Json fams = Json::array();
  if (const auto r = a.fam.range()) {
    const auto& [name, bounds] = *r;
    const auto [lo, hi] = bounds;
    const bool log_scale = lo > 0.0 && hi / lo >= 10.0;
    for (int i = 0; i < a.steps; ++i) {
      const double t = a.steps == 1 ? 0.0 : double(i) / (a.steps - 1);
      const double value = log_scale ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
      const auto f = parse_family(a.fam.build(name, value));
      fams.push_back(family_spec(f.get()));
      csv += theory_rows(a, f.get());
    }
    run.info()["sweep"] = {{"parameter", name}, {"from", lo}, {"to", hi}, {"steps", a.steps},
                           {"scale", log_scale ? "log" : "linear"}};
  } else {
    const auto f = parse_family(a.fam.build());
    fams.push_back(family_spec(f.get()));
    csv += theory_rows(a, f.get());
  }
  run.info()["families"] = fams;
  run.info()["what"] = a.what;
  run.set_manifest_path(a.manifest);
  run.emit(a.out, csv);
  return 0;
}

struct VerifyArgs {
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out, manifest;
};

int cmd_verify(const VerifyArgs& a, Run& run) {
  Json opts = Json::object();
  if (a.seed) opts["seed"] = *a.seed;
  if (a.reps) {
    opts["sampler_reps"] = *a.reps;
    opts["study_reps"] = *a.reps;
  }
  char* js = nullptr;
  int pass = 0;
  check(invms_verify(a.suite.c_str(), opts.dump().c_str(), &js, &pass));
  const std::string report = take(js);
  const auto parsed = Json::parse(report);
  for (const auto& s : parsed["suites"]) {
    std::cerr << (s["pass"].get<bool>() ? "PASS " : "FAIL ") << s["suite"].get<std::string>()
              << "\n";
    for (const auto& c : s["checks"]) {
      if (!c["pass"].get<bool>())
        std::cerr << "  failed: " << c["name"].get<std::string>() << " ("
                  << c["detail"].get<std::string>() << ")\n";
    }
  }
  run.info()["suite"] = a.suite;
  run.info()["options"] = opts;
  run.info()["all_pass"] = pass == 1;
  run.set_manifest_path(a.manifest);
  run.emit(a.out, report + "\n");
  return pass == 1 ? 0 : kExitChecksFailed;
}

struct Fig2Args {
  std::vector<double> lambdas{0.3, 1.3};
  std::size_t reps = 100;
  std::size_t n = 1000;
  double threshold = 0.935;
  std::uint64_t seed = 0;
  std::vector<double> probs{0.025, 0.5, 0.975};
  std::string out, manifest;
};

int cmd_fig2(const Fig2Args& a, Run& run) {
  std::string csv = "lambda,series,p,x,q\n";
  Json summary = Json::array();
  for (double lambda : a.lambdas) {
    const auto fam = parse_family("family=smith lambda=" + num(lambda));
    Json cfg;
    cfg["reps"] = a.reps;
    cfg["n"] = a.n;
    cfg["threshold_quantile"] = a.threshold;
    cfg["seed"] = a.seed;
    cfg["probs"] = a.probs;
    cfg["models"] = {"canonical", "smith"};
    char* js = nullptr;
    check(invms_quantile_study(fam.get(), cfg.dump().c_str(), &js));
    const auto r = Json::parse(take(js));
    const auto xs = r["x_grid"].get<std::vector<double>>();
    const auto ps = r["probs"].get<std::vector<double>>();
    const auto emit_series = [&](const std::string& name, const Json& curves) {
      for (std::size_t k = 0; k < ps.size(); ++k) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
          csv += num(lambda) + "," + name + "," + num(ps[k]) + "," + num(xs[i]) + "," +
                 num(curves[k][i].get<double>()) + "\n";
        }
      }
    };
    for (const auto& m : r["models"]) {
      emit_series(m["model"].get<std::string>(), m["averaged"]);
      summary.push_back({{"lambda", lambda},
                         {"model", m["model"]},
                         {"fits_used", m["fits_used"]},
                         {"fits_nonconverged", m["fits_nonconverged"]}});
    }
    emit_series("theory", r["theory"]);
    const auto iqr = r["iqr"].get<std::vector<double>>();
    for (std::size_t i = 0; i < xs.size(); ++i)
      csv += num(lambda) + ",iqr,," + num(xs[i]) + "," + num(iqr[i]) + "\n";
  }
  run.info()["family"] = "smith";
  run.info()["lambdas"] = a.lambdas;
  run.info()["seeds"] = {{"seed", a.seed}, {"streams", "0.." + std::to_string(a.reps - 1)}};
  run.info()["thresholds"] = {{"quantile", a.threshold}};
  run.info()["replicates"] = a.reps;
  run.info()["n"] = a.n;
  run.info()["fits"] = summary;
  run.info()["quantile_convention"] = "type7";
  run.set_manifest_path(a.manifest);
  run.emit(a.out, csv);
  return 0;
}

void add_output(CLI::App* app, std::string& out, std::string& manifest) {
  app->add_option("-o,--out", out, "output file (stdout when omitted)");
  app->add_option("--manifest", manifest, "manifest path (default <out>.manifest.json)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverted max-stable models: simulation, fitting and theory checks"};
  app.set_version_flag("--version", std::string(invms_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "draw a sample in unit exponential margins");
  sim.fam.attach(c_sim);
  c_sim->add_option("--n", sim.n, "sample size")->required()->check(CLI::PositiveNumber);
  c_sim->add_option("--seed", sim.seed, "random seed")->required();
  c_sim->add_option("--stream", sim.stream, "stream index within the seed");
  add_output(c_sim, sim.out, sim.manifest);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "fit a conditional extremes model to x,y data");
  c_fit->add_option("--in", fit.in, "input CSV with columns x,y")->required();
  c_fit->add_option("--model", fit.model, "canonical, smith or gamma")
      ->check(CLI::IsMember({"canonical", "smith", "gamma"}));
  c_fit->add_option("--threshold", fit.threshold, "threshold quantile")->check(open_unit());
  c_fit->add_flag("--empirical-threshold", fit.empirical,
                  "use the empirical quantile of x as threshold");
  c_fit->add_option("--residuals", fit.residuals, "residuals CSV (x,y,residual)");
  add_output(c_fit, fit.out, fit.manifest);

  QuantilesArgs qa;
  auto* c_q = app.add_subcommand("quantiles", "fitted and theoretical conditional quantiles");
  qa.fam.attach(c_q);
  c_q->add_option("--in", qa.in, "input CSV with columns x,y")->required();
  c_q->add_option("--model", qa.model, "canonical, smith or gamma")
      ->check(CLI::IsMember({"canonical", "smith", "gamma"}));
  c_q->add_option("--threshold", qa.threshold, "threshold quantile")->check(open_unit());
  c_q->add_flag("--empirical-threshold", qa.empirical, "empirical threshold");
  c_q->add_option("--probs", qa.probs, "quantile levels")->delimiter(',')->check(open_unit());
  c_q->add_option("--grid-points", qa.points, "x grid size")->check(CLI::PositiveNumber);
  c_q->add_option("--x-max", qa.x_max, "upper end of the x grid (default max x)");
  add_output(c_q, qa.out, qa.manifest);

  TheoryArgs th;
  auto* c_th = app.add_subcommand("theory", "norming functions, limit laws, convergence");
  th.fam.attach(c_th);
  c_th->add_option("--what", th.what, "norming, limit or convergence")
      ->check(CLI::IsMember({"norming", "limit", "convergence"}));
  c_th->add_option("--steps", th.steps, "values in a lo..hi parameter sweep")
      ->check(CLI::Range(2, 1000));
  c_th->add_option("--points", th.points, "grid points per curve")->check(CLI::Range(2, 100000));
  add_output(c_th, th.out, th.manifest);

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "run the verification suites");
  c_ver->add_option("--suite", ver.suite,
                    "moment, eta, lemma1, convergence, variation, sampler, fig2 or all")
      ->check(CLI::IsMember(
          {"all", "moment", "eta", "lemma1", "convergence", "variation", "sampler", "fig2"}));
  c_ver->add_option("--seed", ver.seed, "seed for the stochastic suites");
  c_ver->add_option("--reps", ver.reps, "replicates for the stochastic suites")
      ->check(CLI::PositiveNumber);
  add_output(c_ver, ver.out, ver.manifest);

  Fig2Args f2;
  auto* c_f2 = app.add_subcommand("fig2", "replicated Smith quantile study");
  c_f2->add_option("--lambda", f2.lambdas, "Smith lambda values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  c_f2->add_option("--reps", f2.reps, "replicates")->check(CLI::PositiveNumber);
  c_f2->add_option("--n", f2.n, "sample size per replicate")->check(CLI::PositiveNumber);
  c_f2->add_option("--threshold", f2.threshold, "threshold quantile")->check(open_unit());
  c_f2->add_option("--seed", f2.seed, "random seed")->required();
  c_f2->add_option("--probs", f2.probs, "quantile levels")->delimiter(',')->check(open_unit());
  add_output(c_f2, f2.out, f2.manifest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  Run run(sub->get_name(), argc, argv);
  try {
    int code = 0;
    if (sub == c_sim) code = cmd_simulate(sim, run);
    else if (sub == c_fit) code = cmd_fit(fit, run);
    else if (sub == c_q) code = cmd_quantiles(qa, run);
    else if (sub == c_th) code = cmd_theory(th, run);
    else if (sub == c_ver) code = cmd_verify(ver, run);
    else code = cmd_fig2(f2, run);
    run.write_manifest();
    return code;
  } catch (const CliError& e) {
    std::cerr << "invms-cli " << sub->get_name() << ": error: " << e.message << "\n";
    return e.code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invms-cli " << sub->get_name() << ": error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
