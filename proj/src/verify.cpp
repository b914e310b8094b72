#include "invms/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <numeric>

#include "invms/error.hpp"
#include "invms/fit.hpp"
#include "invms/ims.hpp"
#include "invms/norming.hpp"
#include "invms/sample_stats.hpp"
#include "invms/simulate.hpp"
#include "invms/variation.hpp"

namespace invms {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CheckResult check_le(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckResult check_flag(std::string name, bool pass, double value, std::string detail = {}) {
  return {std::move(name), pass, value, 0.0, std::move(detail)};
}

SuiteResult finish(std::string suite, std::vector<CheckResult> checks) {
  SuiteResult r{std::move(suite), !checks.empty(), std::move(checks)};
  for (const auto& c : r.checks) r.pass = r.pass && c.pass;
  return r;
}

// Runs `body`, turning a library error into a failed check.
void guarded(std::vector<CheckResult>& out, const std::string& name,
             const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    out.push_back({name, false, std::nan(""), 0.0, std::string("error: ") + e.what()});
  }
}

// ---------------------------------------------------------------------------

SuiteResult suite_moment() {
  std::vector<CheckResult> out;
  for (const auto& fam : catalog_settings()) {
    const std::string name = to_spec_string(fam);
    guarded(out, name, [&] {
      const auto rep = validate(fam, QuadratureSpec{}, 1e-6);
      out.push_back({name, rep.pass, rep.max_violation, 1e-6,
                     fmt("mass %.12g, moment %.12g", rep.total_mass, rep.moment)});
    });
  }
  return finish("moment", std::move(out));
}

SuiteResult suite_eta() {
  std::vector<CheckResult> out;
  for (const auto& fam : catalog_settings()) {
    const std::string name = to_spec_string(fam);
    guarded(out, name, [&] {
      const ImsDistribution d(fam);
      // Least-squares slope of -log Pr(X > q, Y > q) on q over [10, 30].
      std::vector<double> q, lj;
      for (int i = 0; i <= 40; ++i) {
        q.push_back(10.0 + 0.5 * i);
        lj.push_back(-std::log(joint_survivor(d, q.back(), q.back())));
      }
      const double qm = mean(q), lm = mean(lj);
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        sxy += (q[i] - qm) * (lj[i] - lm);
        sxx += (q[i] - qm) * (q[i] - qm);
      }
      const double eta_fit = sxx / sxy;
      const double eta_exact = 1.0 / v(fam, 1.0, 1.0);
      out.push_back(check_le(name, std::abs(eta_exact - eta_fit), 1e-3,
                             fmt("eta %.10g, slope fit %.10g", eta_exact, eta_fit)));
    });
  }
  return finish("eta", std::move(out));
}

SuiteResult suite_lemma1() {
  std::vector<CheckResult> out;
  const std::vector<ExponentFamily> fams{ExponentFamily::smith(1.3), ExponentFamily::schlather(0.0),
                                         ExponentFamily::mixed_logistic(0.5)};
  for (const auto& fam : fams) {
    const std::string name = to_spec_string(fam);
    guarded(out, name, [&] {
      const TailClass tc = classify_tail(fam);
      const double target = tc.w_lower * tc.atom - 1.0;
      std::vector<double> err;
      for (double x : {1e2, 1e4, 1e6}) {
        const double y = lemma1_path_y(x, tc.w_lower);
        err.push_back(std::abs(v1(fam, 1.0, x / y) - target));
      }
      const bool strict = err[0] > err[1] && err[1] > err[2];
      const double ratio = err[2] / err[1];
      char buf[200];
      std::snprintf(buf, sizeof buf, "limit %.6g; errors %.3e, %.3e, %.3e", target, err[0], err[1],
                    err[2]);
      out.push_back({name, strict && ratio <= 0.1, ratio, 0.1, buf});
    });
  }
  return finish("lemma1", std::move(out));
}

SuiteResult suite_convergence() {
  std::vector<CheckResult> out;
  struct Case {
    ExponentFamily fam;
    // Rate normalization r(u); empty for cases without a stated rate.
    std::function<double(double)> rate;
  };
  const std::vector<Case> cases{
      {ExponentFamily::logistic(0.5), {}},
      {ExponentFamily::schlather(0.0), {}},
      {ExponentFamily::smith(1.3),
       [](double u) { return std::sqrt(std::log(u)) / std::log(std::log(u)); }},
      {ExponentFamily::gamma_varying(1.0, 1.0, 0.0),
       [](double u) { return std::log(u) / std::log(std::log(u)); }},
  };
  const double ps_tail[] = {0.05, 1e-7, 1e-13};
  for (const auto& c : cases) {
    const std::string name = to_spec_string(c.fam);
    guarded(out, name + " decrease", [&] {
      std::vector<double> us, ds;
      for (double tail : ps_tail) {
        us.push_back(-std::log(tail));
        ds.push_back(convergence_distance(c.fam, us.back()).distance);
      }
      char buf[200];
      std::snprintf(buf, sizeof buf, "D = %.4e, %.4e, %.4e at u = %.4g, %.4g, %.4g", ds[0], ds[1],
                    ds[2], us[0], us[1], us[2]);
      out.push_back(
          check_flag(name + " decrease", ds[0] > ds[1] && ds[1] > ds[2], ds[2] / ds[0], buf));
      if (c.rate) {
        std::vector<double> scaled;
        for (std::size_t i = 0; i < us.size(); ++i) scaled.push_back(ds[i] * c.rate(us[i]));
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        std::snprintf(buf, sizeof buf, "scaled D = %.4g, %.4g, %.4g", scaled[0], scaled[1],
                      scaled[2]);
        out.push_back({name + " rate", *hi < 5.0 * *lo, *hi / *lo, 5.0, buf});
      }
    });
  }
  return finish("convergence", std::move(out));
}

SuiteResult suite_variation() {
  std::vector<CheckResult> out;
  const std::vector<double> taus{0.25, 0.5, 0.75};

  // Slowly varying functions.
  const auto mlog = [](double w) { return -std::log(w); };
  const std::vector<std::pair<std::string, RealFn>> sv{
      {"L = 2", [](double) { return 2.0; }},
      {"L = -log w", mlog},
      {"L = log(-log w)", [=](double w) { return std::log(mlog(w)); }},
      {"L = exp{(-log w)^0.25}", [=](double w) { return std::exp(std::pow(mlog(w), 0.25)); }},
      {"L = exp{(-log w)^0.4}", [=](double w) { return std::exp(std::pow(mlog(w), 0.4)); }},
      {"L = exp{-log w / log(-log w)}",
       [=](double w) { return std::exp(mlog(w) / std::log(mlog(w))); }},
  };
  for (const auto& [label, L] : sv) {
    const std::string name = "slowly varying " + label;
    guarded(out, name, [&] {
      const auto rep = slowly_varying_condition(L, taus);
      double worst = 0.0;
      for (double d : rep.last_deviation) worst = std::max(worst, d);
      out.push_back(check_flag(name, rep.pass, worst, "largest |ratio - 1| at w = 1e-12"));
    });
  }

  // Gamma variation of spectral tails.
  const std::vector<double> zs{-1.0, -0.5, 0.5, 1.0};
  {
    const double lambda = 1.3;
    const auto fam = ExponentFamily::smith(lambda);
    std::vector<double> s_grid;
    for (int k : {2, 5, 10, 20, 50, 100, 200, 300}) s_grid.push_back(std::pow(10.0, -k));
    guarded(out, "gamma variation smith", [&] {
      const auto rep = gamma_variation_check(
          [&](double w) { return log_spectral_density(fam, w); },
          [&](double w) { return -lambda * lambda * w / std::log(w); }, s_grid, zs, 0.01);
      out.push_back({"gamma variation smith", rep.pass, rep.max_deviation_at_smallest, 0.01,
                     fmt("s = %.3g, f/s = %.4g", rep.smallest_s, rep.f_over_s_at_smallest)});
    });
  }
  {
    const double gamma = 1.0, kappa = 1.0;
    const auto fam = ExponentFamily::gamma_varying(gamma, kappa, 0.0);
    std::vector<double> s_grid;
    for (int k : {1, 2, 3, 4, 5, 6, 8}) s_grid.push_back(std::pow(10.0, -k));
    guarded(out, "gamma variation gammavarying", [&] {
      const auto rep = gamma_variation_check(
          [&](double w) { return log_spectral_density(fam, w); },
          [&](double w) { return std::pow(w, 1.0 + gamma) / (kappa * gamma); }, s_grid, zs, 0.01);
      out.push_back({"gamma variation gammavarying", rep.pass, rep.max_deviation_at_smallest, 0.01,
                     fmt("s = %.3g, f/s = %.4g", rep.smallest_s, rep.f_over_s_at_smallest)});
    });
  }

  // Integral expansion for (U, g) pairs.
  std::vector<double> w_grid;
  for (int k = 2; k <= 6; ++k) w_grid.push_back(std::pow(10.0, -k));
  const RealFn one = [](double) { return 1.0; };
  const RealFn ident = [](double s) { return s; };
  const RealFn log_exp_inv = [](double s) { return -1.0 / s; };
  const RealFn sq = [](double s) { return s * s; };
  const auto gv = ExponentFamily::gamma_varying(1.0, 1.0, 0.0);
  const auto sm = ExponentFamily::smith(0.3);
  struct Pair2 {
    std::string name;
    RealFn U, log_g, f;
  };
  const std::vector<Pair2> pairs{
      {"U = 1, g = exp(-1/w)", one, log_exp_inv, sq},
      {"U = w, g = exp(-1/w)", ident, log_exp_inv, sq},
      {"U = 1, g = gammavarying h", one, [=](double s) { return log_spectral_density(gv, s); },
       sq},
      {"U = w, g = smith h (lambda 0.3)", ident,
       [=](double s) { return log_spectral_density(sm, s); },
       [](double s) { return -0.09 * s / std::log(s); }},
  };
  for (const auto& p : pairs) {
    const std::string name = "integral expansion " + p.name;
    guarded(out, name, [&] {
      const auto rep = lemma2_expansion_check(p.U, p.log_g, p.f, w_grid, 0.02);
      out.push_back(check_le(name, std::abs(rep.ratio_at_smallest - 1.0), 0.02,
                             fmt("ratio %.6g at w = %.0e", rep.ratio_at_smallest, w_grid.back())));
    });
  }
  guarded(out, "negative control g = w^2", [&] {
    const auto rep = lemma2_expansion_check(
        one, [](double s) { return 2.0 * std::log(s); }, [](double s) { return 0.5 * s; }, w_grid,
        0.02);
    out.push_back(check_flag("negative control g = w^2", !rep.pass, rep.ratio_at_smallest,
                             "expected failure, ratio stays at 2/3"));
  });
  return finish("variation", std::move(out));
}

SuiteResult suite_sampler(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  const double grid[] = {0.5, 1.5, 3.0};
  const auto exp_cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  for (const auto& fam : catalog_representatives()) {
    const std::string name = to_spec_string(fam);
    guarded(out, name, [&] {
      const auto sets = replicate(fam, opts.sampler_n, opts.sampler_reps, opts.seed);
      std::size_t ad_x = 0, ad_y = 0;
      std::vector<Pair> pooled;
      pooled.reserve(opts.sampler_n * opts.sampler_reps);
      for (const auto& s : sets) {
        const auto xs = s.xs(), ys = s.ys();
        if (anderson_darling(xs, exp_cdf) <= kAndersonDarlingCritical1pct) ++ad_x;
        if (anderson_darling(ys, exp_cdf) <= kAndersonDarlingCritical1pct) ++ad_y;
        pooled.insert(pooled.end(), s.pairs.begin(), s.pairs.end());
      }
      const double need = std::ceil(0.95 * double(opts.sampler_reps));
      out.push_back({name + " AD margins", double(ad_x) >= need && double(ad_y) >= need,
                     double(std::min(ad_x, ad_y)), need,
                     fmt("x passes %.0f, y passes %.0f", double(ad_x), double(ad_y))});

      const ImsDistribution d(fam);
      const double n = double(pooled.size());
      double worst = 0.0;
      std::string where;
      for (double gx : grid) {
        for (double gy : grid) {
          const double p = joint_survivor(d, gx, gy);
          const auto hits = std::count_if(pooled.begin(), pooled.end(), [&](const Pair& q) {
            return q.first > gx && q.second > gy;
          });
          const double se = std::sqrt(p * (1.0 - p) / n);
          const double z = std::abs(double(hits) / n - p) / se;
          if (z >= worst) {
            worst = z;
            where = fmt("worst at (%.1f, ", gx) + fmt("%.1f)", gy);
          }
        }
      }
      out.push_back(check_le(name + " joint survivor", worst, 4.0, where + " in standard errors"));
    });
  }
  return finish("sampler", std::move(out));
}

SuiteResult suite_fig2(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (double lambda : {0.3, 1.3}) {
    const std::string tag = fmt("lambda %.1f", lambda);
    guarded(out, tag, [&] {
      QuantileStudyConfig cfg;
      cfg.family = ExponentFamily::smith(lambda);
      cfg.reps = opts.study_reps;
      cfg.n = opts.study_n;
      cfg.threshold_quantile = opts.study_threshold;
      cfg.seed = opts.seed;
      const auto r = run_quantile_study(cfg);
      const std::size_t ng = r.x_grid.size();
      for (std::size_t m = 0; m < r.models.size(); ++m) {
        for (std::size_t k = 0; k < r.probs.size(); ++k) {
          double acc = 0.0;
          for (std::size_t i = 0; i < ng; ++i)
            acc += std::abs(r.averaged[m][k][i] - r.theory[k][i]) / r.iqr[i];
          const std::string name = tag + " " + std::string(model_kind_name(r.models[m])) +
                                   fmt(" p=%.3g", r.probs[k]);
          out.push_back(check_le(name, acc / double(ng), 0.15,
                                 fmt("fits used %.0f, nonconverged %.0f", double(r.fits_used[m]),
                                     double(r.fits_nonconverged[m]))));
        }
      }
      const auto median = std::find(r.probs.begin(), r.probs.end(), 0.5) - r.probs.begin();
      double acc = 0.0, worst = 0.0;
      for (std::size_t i = 0; i < ng; ++i) {
        const double d = std::abs(r.averaged[0][median][i] - r.averaged[1][median][i]) / r.iqr[i];
        acc += d;
        worst = std::max(worst, d);
      }
      out.push_back(check_le(tag + " median agreement", acc / double(ng), 0.05,
                             fmt("largest pointwise %.4g of IQR", worst)));
    });
  }
  return finish("fig2", std::move(out));
}

}  // namespace

std::vector<ExponentFamily> catalog_settings() {
  using F = ExponentFamily;
  return {
      F::smith(0.3),
      F::smith(1.3),
      F::smith(3.0),
      F::schlather(-0.5),
      F::schlather(0.0),
      F::schlather(0.7),
      F::extremal_t(1.0, 0.0),
      F::extremal_t(2.0, 0.5),
      F::extremal_t(5.0, -0.3),
      F::mixed_logistic(0.2),
      F::mixed_logistic(0.5),
      F::mixed_logistic(0.9),
      F::asymmetric_logistic(0.4, 0.7, 0.5),
      F::asymmetric_logistic(1.0, 1.0, 0.3),
      F::asymmetric_logistic(0.8, 0.3, 0.8),
      F::asymmetric_mixed(0.5, 0.1),
      F::asymmetric_mixed(0.2, 0.3),
      F::asymmetric_mixed(1.0, 0.0),
      F::marshall_olkin(0.3),
      F::marshall_olkin(0.6),
      F::marshall_olkin(1.0),
      F::logistic(0.3),
      F::logistic(0.6),
      F::logistic(1.0),
      F::gamma_varying(1.0, 1.0, 0.0),
      F::gamma_varying(0.5, 2.0, 1.0),
      F::gamma_varying(2.0, 0.5, -0.5),
  };
}

std::vector<ExponentFamily> catalog_representatives() {
  using F = ExponentFamily;
  return {
      F::smith(1.3),
      F::schlather(0.0),
      F::extremal_t(2.0, 0.5),
      F::mixed_logistic(0.5),
      F::asymmetric_logistic(0.4, 0.7, 0.5),
      F::asymmetric_mixed(0.5, 0.1),
      F::marshall_olkin(0.6),
      F::logistic(0.6),
      F::gamma_varying(1.0, 1.0, 0.0),
  };
}

std::vector<std::string> suite_names() {
  return {"moment", "eta", "lemma1", "convergence", "variation", "sampler", "fig2"};
}

SuiteResult run_suite(std::string_view name, const VerifyOptions& opts) {
  if (name == "moment") return suite_moment();
  if (name == "eta") return suite_eta();
  if (name == "lemma1") return suite_lemma1();
  if (name == "convergence") return suite_convergence();
  if (name == "variation") return suite_variation();
  if (name == "sampler") return suite_sampler(opts);
  if (name == "fig2") return suite_fig2(opts);
  throw DomainError("unknown verify suite '" + std::string(name) + "'");
}

std::string suites_to_json(const std::vector<SuiteResult>& suites) {
  Json j;
  bool all = !suites.empty();
  Json arr = Json::array();
  for (const auto& s : suites) {
    all = all && s.pass;
    Json checks = Json::array();
    for (const auto& c : s.checks) {
      Json jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["value"] = std::isfinite(c.value) ? Json(c.value) : Json(nullptr);
      jc["threshold"] = c.threshold;
      jc["detail"] = c.detail;
      checks.push_back(std::move(jc));
    }
    Json js;
    js["suite"] = s.suite;
    js["pass"] = s.pass;
    js["checks"] = std::move(checks);
    arr.push_back(std::move(js));
  }
  j["all_pass"] = all;
  j["suites"] = std::move(arr);
  return j.dump(2);
}

}  // namespace invms
