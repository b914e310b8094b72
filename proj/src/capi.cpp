#include "invms/invms.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <new>
#include <string>

#include "invms/error.hpp"
#include "invms/exponent.hpp"
#include "invms/fit.hpp"
#include "invms/ims.hpp"
#include "invms/norming.hpp"
#include "invms/simulate.hpp"
#include "invms/verify.hpp"

struct invms_family {
  invms::ExponentFamily fam;
};

struct invms_fit {
  invms::ConditionalFit fit;
};

namespace {

using Json = nlohmann::ordered_json;

thread_local std::string g_last_error;

invms_status status_of(invms::ErrorKind k) {
  switch (k) {
    case invms::ErrorKind::Domain: return INVMS_E_DOMAIN;
    case invms::ErrorKind::Parse: return INVMS_E_PARSE;
    case invms::ErrorKind::Convergence: return INVMS_E_CONVERGENCE;
    case invms::ErrorKind::Bracket: return INVMS_E_BRACKET;
    case invms::ErrorKind::Data: return INVMS_E_DATA;
    case invms::ErrorKind::Unsupported: return INVMS_E_UNSUPPORTED;
    case invms::ErrorKind::State: return INVMS_E_STATE;
    case invms::ErrorKind::Boundary: return INVMS_E_BOUNDARY;
    case invms::ErrorKind::Numeric: return INVMS_E_NUMERIC;
  }
  return INVMS_E_INTERNAL;
}

template <class F>
invms_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return INVMS_OK;
  } catch (const invms::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return INVMS_E_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return INVMS_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return INVMS_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return INVMS_E_INTERNAL;
  }
}

invms_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return INVMS_E_NULL;
}

#define INVMS_REQUIRE(p) \
  if (!(p)) return null_arg(#p)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json vector_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

extern "C" {

const char* invms_last_error(void) { return g_last_error.c_str(); }

const char* invms_status_name(invms_status s) {
  switch (s) {
    case INVMS_OK: return "ok";
    case INVMS_E_DOMAIN: return "domain";
    case INVMS_E_PARSE: return "parse";
    case INVMS_E_CONVERGENCE: return "convergence";
    case INVMS_E_BRACKET: return "bracket";
    case INVMS_E_DATA: return "data";
    case INVMS_E_UNSUPPORTED: return "unsupported";
    case INVMS_E_STATE: return "state";
    case INVMS_E_BOUNDARY: return "boundary";
    case INVMS_E_NUMERIC: return "numeric";
    case INVMS_E_INTERNAL: return "internal";
    case INVMS_E_NULL: return "null";
  }
  return "unknown";
}

const char* invms_version(void) { return INVMS_VERSION_STRING; }

void invms_string_free(char* s) { std::free(s); }

// ---- families --------------------------------------------------------------

invms_status invms_family_parse(const char* spec, invms_family** out) {
  INVMS_REQUIRE(spec);
  INVMS_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new invms_family{invms::parse_family(spec)}; });
}

invms_status invms_family_from_json(const char* json, invms_family** out) {
  INVMS_REQUIRE(json);
  INVMS_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new invms_family{invms::family_from_json(json)}; });
}

void invms_family_free(invms_family* fam) { delete fam; }

invms_status invms_family_to_json(const invms_family* fam, char** out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = dup_string(invms::to_json(fam->fam)); });
}

invms_status invms_family_spec(const invms_family* fam, char** out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = dup_string(invms::to_spec_string(fam->fam)); });
}

invms_status invms_v(const invms_family* fam, double x, double y, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::v(fam->fam, x, y); });
}

invms_status invms_v1(const invms_family* fam, double x, double y, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::v1(fam->fam, x, y); });
}

invms_status invms_spectral_density(const invms_family* fam, double w, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::spectral_density(fam->fam, w); });
}

invms_status invms_atom_masses(const invms_family* fam, double* lower, double* upper) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(lower);
  INVMS_REQUIRE(upper);
  return guard([&] {
    const auto a = invms::atom_masses(fam->fam);
    *lower = a.lower;
    *upper = a.upper;
  });
}

invms_status invms_eta(const invms_family* fam, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::eta(fam->fam); });
}

invms_status invms_validate(const invms_family* fam, double tolerance, char** json, int* pass) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(json);
  INVMS_REQUIRE(pass);
  return guard([&] {
    const auto r = invms::validate(fam->fam, invms::QuadratureSpec{}, tolerance);
    Json j;
    j["family"] = invms::to_spec_string(fam->fam);
    j["total_mass"] = r.total_mass;
    j["moment"] = r.moment;
    j["mass_violation"] = r.mass_violation;
    j["moment_violation"] = r.moment_violation;
    j["max_violation"] = r.max_violation;
    j["tolerance"] = tolerance;
    j["pass"] = r.pass;
    j["degenerate"] = r.degenerate;
    j["note"] = r.note;
    *json = dup_string(j.dump(2));
    *pass = r.pass ? 1 : 0;
  });
}

// ---- inverted max-stable law -----------------------------------------------

invms_status invms_joint_survivor(const invms_family* fam, double x, double y, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::joint_survivor(invms::ImsDistribution(fam->fam), x, y); });
}

invms_status invms_conditional_survivor(const invms_family* fam, double y, double x,
                                        double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard(
      [&] { *out = invms::conditional_survivor(invms::ImsDistribution(fam->fam), y, x); });
}

invms_status invms_conditional_quantile(const invms_family* fam, double p, double x,
                                        double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard(
      [&] { *out = invms::conditional_quantile_exact(invms::ImsDistribution(fam->fam), p, x); });
}

// ---- normings and limits ---------------------------------------------------

invms_status invms_norming(const invms_family* fam, double x, double* a, double* b,
                           const char** kind) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(a);
  INVMS_REQUIRE(b);
  return guard([&] {
    const auto np = invms::norming_for(fam->fam);
    *a = np.a(x);
    *b = np.b(x);
    if (kind) *kind = invms::norming_kind_name(np.kind()).data();
  });
}

invms_status invms_limit_cdf(const invms_family* fam, double z, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::limit_law_for(fam->fam).cdf(z); });
}

invms_status invms_limit_quantile(const invms_family* fam, double p, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::limit_law_for(fam->fam).quantile(p); });
}

invms_status invms_limit_atom(const invms_family* fam, double* out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::limit_law_for(fam->fam).atom_at_zero(); });
}

invms_status invms_convergence_distance(const invms_family* fam, double u, double* distance,
                                        double* z_at_sup) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(distance);
  return guard([&] {
    const auto c = invms::convergence_distance(fam->fam, u);
    *distance = c.distance;
    if (z_at_sup) *z_at_sup = c.z_at_sup;
  });
}

// ---- sampling --------------------------------------------------------------

invms_status invms_sample(const invms_family* fam, size_t n, uint64_t seed, uint64_t stream,
                          double* xs, double* ys) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(xs);
  INVMS_REQUIRE(ys);
  return guard([&] {
    invms::RandomStream rs(seed, stream);
    const auto s = invms::sample(fam->fam, n, rs);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = s.pairs[i].first;
      ys[i] = s.pairs[i].second;
    }
  });
}

invms_status invms_csv_parse(const char* text, double** xs, double** ys, size_t* n) {
  INVMS_REQUIRE(text);
  INVMS_REQUIRE(xs);
  INVMS_REQUIRE(ys);
  INVMS_REQUIRE(n);
  *xs = *ys = nullptr;
  *n = 0;
  return guard([&] {
    const auto pairs = invms::pairs_from_csv(text);
    double* bx = static_cast<double*>(std::malloc(pairs.size() * sizeof(double)));
    double* by = static_cast<double*>(std::malloc(pairs.size() * sizeof(double)));
    if (!bx || !by) {
      std::free(bx);
      std::free(by);
      throw std::bad_alloc();
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      bx[i] = pairs[i].first;
      by[i] = pairs[i].second;
    }
    *xs = bx;
    *ys = by;
    *n = pairs.size();
  });
}

invms_status invms_csv_format(const double* xs, const double* ys, size_t n, char** out) {
  INVMS_REQUIRE(xs);
  INVMS_REQUIRE(ys);
  INVMS_REQUIRE(out);
  return guard([&] {
    std::vector<invms::Pair> pairs(n);
    for (std::size_t i = 0; i < n; ++i) pairs[i] = {xs[i], ys[i]};
    *out = dup_string(invms::to_csv(pairs));
  });
}

void invms_buffer_free(double* buf) { std::free(buf); }

// ---- fitting ---------------------------------------------------------------

invms_status invms_fit_create(const double* xs, const double* ys, size_t n, const char* model,
                              double threshold_quantile, int empirical_threshold,
                              invms_fit** out) {
  INVMS_REQUIRE(xs);
  INVMS_REQUIRE(ys);
  INVMS_REQUIRE(model);
  INVMS_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    if (!(threshold_quantile > 0.0 && threshold_quantile < 1.0))
      throw invms::DomainError("fit: threshold quantile must lie in (0, 1)");
    std::vector<invms::Pair> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = {xs[i], ys[i]};
    invms::FitOptions opts;
    opts.threshold_quantile = threshold_quantile;
    opts.empirical_threshold = empirical_threshold != 0;
    *out = new invms_fit{invms::fit_model(data, invms::model_kind_from_name(model), opts)};
  });
}

void invms_fit_free(invms_fit* fit) { delete fit; }

invms_status invms_fit_to_json(const invms_fit* fit, char** out) {
  INVMS_REQUIRE(fit);
  INVMS_REQUIRE(out);
  return guard([&] { *out = dup_string(invms::fit_to_json(fit->fit)); });
}

invms_status invms_fit_converged(const invms_fit* fit, int* out) {
  INVMS_REQUIRE(fit);
  INVMS_REQUIRE(out);
  *out = fit->fit.converged ? 1 : 0;
  return INVMS_OK;
}

invms_status invms_fit_threshold(const invms_fit* fit, double* out) {
  INVMS_REQUIRE(fit);
  INVMS_REQUIRE(out);
  *out = fit->fit.threshold_u;
  return INVMS_OK;
}

invms_status invms_fit_residual_count(const invms_fit* fit, size_t* out) {
  INVMS_REQUIRE(fit);
  INVMS_REQUIRE(out);
  *out = fit->fit.residuals.size();
  return INVMS_OK;
}

invms_status invms_fit_residuals(const invms_fit* fit, double* x, double* y, double* residual) {
  INVMS_REQUIRE(fit);
  INVMS_REQUIRE(x);
  INVMS_REQUIRE(y);
  INVMS_REQUIRE(residual);
  const auto& f = fit->fit;
  for (std::size_t i = 0; i < f.residuals.size(); ++i) {
    x[i] = f.exceedances[i].first;
    y[i] = f.exceedances[i].second;
    residual[i] = f.residuals[i];
  }
  return INVMS_OK;
}

invms_status invms_fit_quantile(const invms_fit* fit, double p, double x, double* out) {
  INVMS_REQUIRE(fit);
  INVMS_REQUIRE(out);
  return guard([&] { *out = invms::quantile_curves(fit->fit, {p}, {x}).front().values.front(); });
}

// ---- studies and verification ----------------------------------------------

invms_status invms_quantile_study(const invms_family* fam, const char* config_json,
                                  char** out) {
  INVMS_REQUIRE(fam);
  INVMS_REQUIRE(out);
  return guard([&] {
    invms::QuantileStudyConfig cfg;
    cfg.family = fam->fam;
    if (config_json && *config_json) {
      const auto j = nlohmann::json::parse(config_json);
      cfg.reps = j.value("reps", cfg.reps);
      cfg.n = j.value("n", cfg.n);
      cfg.threshold_quantile = j.value("threshold_quantile", cfg.threshold_quantile);
      cfg.seed = j.value("seed", cfg.seed);
      cfg.probs = j.value("probs", cfg.probs);
      cfg.x_grid = j.value("x_grid", cfg.x_grid);
      if (j.contains("models")) {
        cfg.models.clear();
        for (const auto& m : j.at("models"))
          cfg.models.push_back(invms::model_kind_from_name(m.get<std::string>()));
      }
    }
    if (!(cfg.threshold_quantile > 0.0 && cfg.threshold_quantile < 1.0))
      throw invms::DomainError("quantile study: threshold quantile must lie in (0, 1)");
    const auto r = invms::run_quantile_study(cfg);
    Json j;
    j["family"] = invms::to_spec_string(cfg.family);
    j["reps"] = cfg.reps;
    j["n"] = cfg.n;
    j["threshold_quantile"] = cfg.threshold_quantile;
    j["seed"] = cfg.seed;
    j["x_grid"] = vector_json(r.x_grid);
    j["probs"] = vector_json(r.probs);
    Json th = Json::array();
    for (const auto& row : r.theory) th.push_back(vector_json(row));
    j["theory"] = std::move(th);
    j["iqr"] = vector_json(r.iqr);
    Json models = Json::array();
    for (std::size_t m = 0; m < r.models.size(); ++m) {
      Json jm;
      jm["model"] = std::string(invms::model_kind_name(r.models[m]));
      jm["fits_used"] = r.fits_used[m];
      jm["fits_nonconverged"] = r.fits_nonconverged[m];
      Json curves = Json::array();
      for (const auto& row : r.averaged[m]) curves.push_back(vector_json(row));
      jm["averaged"] = std::move(curves);
      models.push_back(std::move(jm));
    }
    j["models"] = std::move(models);
    *out = dup_string(j.dump());
  });
}

invms_status invms_verify(const char* suite, const char* options_json, char** json,
                          int* all_pass) {
  INVMS_REQUIRE(suite);
  INVMS_REQUIRE(json);
  INVMS_REQUIRE(all_pass);
  return guard([&] {
    invms::VerifyOptions opts;
    if (options_json && *options_json) {
      const auto j = nlohmann::json::parse(options_json);
      opts.seed = j.value("seed", opts.seed);
      opts.sampler_reps = j.value("sampler_reps", opts.sampler_reps);
      opts.sampler_n = j.value("sampler_n", opts.sampler_n);
      opts.study_reps = j.value("study_reps", opts.study_reps);
      opts.study_n = j.value("study_n", opts.study_n);
      opts.study_threshold = j.value("study_threshold", opts.study_threshold);
    }
    std::vector<std::string> names;
    if (std::string(suite) == "all") names = invms::suite_names();
    else names.emplace_back(suite);
    std::vector<invms::SuiteResult> results;
    bool pass = true;
    for (const auto& n : names) {
      results.push_back(invms::run_suite(n, opts));
      pass = pass && results.back().pass;
    }
    *json = dup_string(invms::suites_to_json(results));
    *all_pass = pass ? 1 : 0;
  });
}

}  // extern "C"
