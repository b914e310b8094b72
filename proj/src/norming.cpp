#include "invms/norming.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "invms/error.hpp"
#include "invms/ims.hpp"

namespace invms {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

TailClass classify_tail(const ExponentFamily& fam) {
  TailClass tc;
  const auto atoms = fam.endpoint_atoms();
  tc.w_lower = fam.support().lower;
  tc.atom = atoms.lower;
  switch (fam.id()) {
    case FamilyId::Smith:
      tc.kind = TailCase::Smith;
      return tc;
    case FamilyId::GammaVarying:
      tc.kind = TailCase::GammaVarying;
      return tc;
    case FamilyId::Schlather:
    case FamilyId::ExtremalT:
    case FamilyId::MixedLogistic:
      tc.kind = TailCase::Atom;
      return tc;
    case FamilyId::MarshallOlkin:
      if (fam.param("alpha") == 0.0)
        throw UnsupportedError("marshallolkin: alpha = 0 is perfect dependence, no non-degenerate limit");
      tc.kind = TailCase::Atom;
      return tc;
    case FamilyId::Logistic: {
      const double a = fam.param("alpha");
      if (a == 1.0) {
        tc.kind = TailCase::Atom;
        return tc;
      }
      tc.kind = TailCase::RegularNoAtom;
      tc.t = 1.0 / a - 2.0;
      tc.s = (1.0 - a) / a;
      return tc;
    }
    case FamilyId::AsymmetricLogistic: {
      if (tc.atom > 0.0) {
        tc.kind = TailCase::Atom;
        return tc;
      }
      const double a = fam.param("alpha"), th = fam.param("theta");
      tc.kind = TailCase::RegularNoAtom;
      tc.t = 1.0 / a - 2.0;
      tc.s = (1.0 - a) / a * std::pow(th, 1.0 - 1.0 / a);
      return tc;
    }
    case FamilyId::AsymmetricMixed:
      if (tc.atom > 0.0) {
        tc.kind = TailCase::Atom;
        return tc;
      }
      tc.kind = TailCase::RegularNoAtom;
      tc.t = 0.0;
      tc.s = 2.0 * fam.param("theta");
      return tc;
    case FamilyId::Custom:
      break;
  }
  throw UnsupportedError(fam.label() + ": lower tail of the spectral measure is not catalogued");
}

// ---------------------------------------------------------------------------

NormingPair NormingPair::canonical(double alpha, double beta) {
  require(alpha >= 0.0 && alpha <= 1.0, "canonical norming: alpha must lie in [0, 1]");
  require(beta < 1.0, "canonical norming: beta must be < 1");
  NormingPair np;
  np.kind_ = NormingKind::Canonical;
  np.params_ = {{"alpha", alpha}, {"beta", beta}};
  np.a_ = [alpha](double x) { return alpha * x; };
  np.b_ = [beta](double x) { return std::pow(x, beta); };
  return np;
}

NormingPair NormingPair::corollary1_i(double w_lower, double t, RealFn slowly_varying) {
  require(w_lower >= 0.0 && w_lower < 0.5, "corollary1_i: w_lower must lie in [0, 1/2)");
  require(t > -1.0, "corollary1_i: t must be > -1");
  require(bool(slowly_varying), "corollary1_i: empty slowly varying function");
  NormingPair np;
  np.kind_ = NormingKind::Corollary1i;
  np.params_ = {{"w_lower", w_lower}, {"t", t}};
  const double slope = w_lower / (1.0 - w_lower);
  np.a_ = [slope](double x) { return slope * x; };
  np.b_ = [t, L = std::move(slowly_varying)](double x) {
    const double l = L(std::pow(x, -1.0 / (t + 2.0)));
    if (!(l > 0.0)) throw DomainError("corollary1_i: slowly varying function must be positive");
    return std::pow(x, (t + 1.0) / (t + 2.0)) * std::pow(l, -1.0 / (t + 2.0));
  };
  return np;
}

NormingPair NormingPair::corollary1_i(double w_lower, double t) {
  NormingPair np = corollary1_i(w_lower, t, [](double) { return 1.0; });
  const double beta = (t + 1.0) / (t + 2.0);
  np.b_ = [beta](double x) { return std::pow(x, beta); };
  return np;
}

NormingPair NormingPair::corollary1_ii(double w_lower, double atom) {
  require(w_lower >= 0.0 && w_lower < 0.5, "corollary1_ii: w_lower must lie in [0, 1/2)");
  require(atom > 0.0 && atom <= 2.0, "corollary1_ii: atom mass must lie in (0, 2]");
  NormingPair np;
  np.kind_ = NormingKind::Corollary1ii;
  np.params_ = {{"w_lower", w_lower}, {"atom", atom}};
  const double slope = w_lower / (1.0 - w_lower);
  np.a_ = [slope](double x) { return slope * x; };
  np.b_ = [](double) { return 1.0; };
  return np;
}

NormingPair NormingPair::smith(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "smith norming: lambda must be > 0");
  NormingPair np;
  np.kind_ = NormingKind::Smith;
  np.params_ = {{"lambda", lambda}};
  np.min_x_ = 1.0;
  np.a_ = [lambda](double x) {
    const double lx = std::log(x);
    const double r = std::sqrt(2.0 * lx);
    return x * std::exp(-lambda * r + lambda * std::log(lx) / r + 0.5 * lambda * lambda);
  };
  np.b_ = [a = np.a_](double x) { return a(x) / std::sqrt(std::log(x)); };
  return np;
}

NormingPair NormingPair::gamma_vary(double gamma, double kappa, double delta) {
  require(gamma > 0.0 && kappa > 0.0 && std::isfinite(delta),
          "gamma norming: need gamma > 0, kappa > 0, finite delta");
  NormingPair np;
  np.kind_ = NormingKind::GammaVary;
  np.params_ = {{"gamma", gamma}, {"kappa", kappa}, {"delta", delta}};
  np.min_x_ = 1.0;
  np.a_ = [gamma, kappa, delta](double x) {
    const double lx = std::log(x);
    return x * std::pow(kappa / lx, 1.0 / gamma) *
           (1.0 + (delta + 2.0 * (1.0 + gamma)) / (gamma * gamma) * std::log(lx) / lx);
  };
  np.b_ = [gamma](double x) { return x * std::pow(std::log(x), -1.0 - 1.0 / gamma); };
  return np;
}

double NormingPair::a(double x) const {
  if (!(x > min_x_)) throw DomainError("norming: a(x) needs x > " + std::to_string(min_x_));
  return a_(x);
}

double NormingPair::b(double x) const {
  if (!(x > min_x_)) throw DomainError("norming: b(x) needs x > " + std::to_string(min_x_));
  return b_(x);
}

std::string_view norming_kind_name(NormingKind k) {
  switch (k) {
    case NormingKind::Canonical: return "canonical";
    case NormingKind::Corollary1i: return "corollary1_i";
    case NormingKind::Corollary1ii: return "corollary1_ii";
    case NormingKind::Smith: return "smith";
    case NormingKind::GammaVary: return "gammavary";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

LimitLaw LimitLaw::weibull_type(double s, double t) {
  require(s > 0.0 && t > -1.0, "weibull limit: need s > 0, t > -1");
  LimitLaw g;
  g.kind_ = LimitKind::WeibullType;
  g.params_ = {{"s", s}, {"t", t}};
  g.c_ = s / ((t + 1.0) * (t + 2.0));
  g.d_ = t + 2.0;
  return g;
}

LimitLaw LimitLaw::corollary1_i(double w_lower, double t, double s) {
  require(w_lower >= 0.0 && w_lower < 0.5, "corollary1_i limit: w_lower must lie in [0, 1/2)");
  LimitLaw g = weibull_type(s, t);
  g.kind_ = LimitKind::Corollary1i;
  g.params_ = {{"w_lower", w_lower}, {"t", t}, {"s", s}};
  g.c_ *= std::pow(1.0 - w_lower, 3.0 + 2.0 * t);
  return g;
}

LimitLaw LimitLaw::corollary1_ii(double w_lower, double atom) {
  require(w_lower >= 0.0 && w_lower < 0.5, "corollary1_ii limit: w_lower must lie in [0, 1/2)");
  require(atom > 0.0 && atom <= 2.0, "corollary1_ii limit: atom mass must lie in (0, 2]");
  LimitLaw g;
  g.kind_ = LimitKind::Corollary1ii;
  g.params_ = {{"w_lower", w_lower}, {"atom", atom}};
  g.c_ = w_lower * atom;
  g.d_ = (1.0 - w_lower) * atom;
  return g;
}

LimitLaw LimitLaw::reverted_gumbel_smith(double lambda) {
  require(lambda > 0.0, "smith limit: lambda must be > 0");
  LimitLaw g;
  g.kind_ = LimitKind::RevertedGumbelSmith;
  g.params_ = {{"lambda", lambda}};
  g.c_ = lambda / std::sqrt(8.0 * std::numbers::pi);
  g.d_ = std::numbers::sqrt2 / lambda;
  return g;
}

LimitLaw LimitLaw::reverted_gumbel_gamma(double gamma, double kappa, double delta,
                                         double tail_constant) {
  require(gamma > 0.0 && kappa > 0.0 && std::isfinite(delta) && tail_constant > 0.0,
          "gamma limit: need gamma > 0, kappa > 0, finite delta, positive tail constant");
  LimitLaw g;
  g.kind_ = LimitKind::RevertedGumbelGamma;
  g.params_ = {{"gamma", gamma}, {"kappa", kappa}, {"delta", delta},
               {"tail_constant", tail_constant}};
  g.c_ = tail_constant * std::pow(kappa, (delta + 2.0) / gamma) / (gamma * gamma);
  g.d_ = gamma * std::pow(kappa, -1.0 / gamma);
  return g;
}

LimitLaw LimitLaw::working_normal(double mu, double sigma) {
  require(std::isfinite(mu) && sigma > 0.0, "normal limit: need finite mu and sigma > 0");
  LimitLaw g;
  g.kind_ = LimitKind::WorkingNormal;
  g.params_ = {{"mu", mu}, {"sigma", sigma}};
  g.c_ = mu;
  g.d_ = sigma;
  return g;
}

double LimitLaw::cdf(double z) const {
  if (std::isnan(z)) throw DomainError("limit cdf: z is NaN");
  switch (kind_) {
    case LimitKind::WeibullType:
    case LimitKind::Corollary1i:
      if (z <= 0.0) return 0.0;
      return -std::expm1(-c_ * std::pow(z, d_));
    case LimitKind::Corollary1ii:
      if (z < 0.0) return 0.0;
      return 1.0 - (1.0 - c_) * std::exp(-d_ * z);
    case LimitKind::RevertedGumbelSmith:
    case LimitKind::RevertedGumbelGamma:
      return -std::expm1(-c_ * std::exp(d_ * z));
    case LimitKind::WorkingNormal:
      return std_normal_cdf((z - c_) / d_);
  }
  return 0.0;
}

double LimitLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("limit quantile: p must lie in (0, 1)");
  const double e = -std::log1p(-p);
  switch (kind_) {
    case LimitKind::WeibullType:
    case LimitKind::Corollary1i:
      return std::pow(e / c_, 1.0 / d_);
    case LimitKind::Corollary1ii:
      if (p <= c_) return 0.0;
      return (e + std::log1p(-c_)) / d_;
    case LimitKind::RevertedGumbelSmith:
    case LimitKind::RevertedGumbelGamma:
      return (std::log(e) - std::log(c_)) / d_;
    case LimitKind::WorkingNormal:
      return c_ + d_ * std_normal_quantile(p);
  }
  return 0.0;
}

std::string_view limit_kind_name(LimitKind k) {
  switch (k) {
    case LimitKind::WeibullType: return "weibull_type";
    case LimitKind::Corollary1i: return "corollary1_i";
    case LimitKind::Corollary1ii: return "corollary1_ii";
    case LimitKind::RevertedGumbelSmith: return "reverted_gumbel_smith";
    case LimitKind::RevertedGumbelGamma: return "reverted_gumbel_gamma";
    case LimitKind::WorkingNormal: return "working_normal";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

NormingPair norming_for(const ExponentFamily& fam) {
  const TailClass tc = classify_tail(fam);
  switch (tc.kind) {
    case TailCase::Atom: return NormingPair::corollary1_ii(tc.w_lower, tc.atom);
    case TailCase::RegularNoAtom: return NormingPair::corollary1_i(tc.w_lower, tc.t);
    case TailCase::Smith: return NormingPair::smith(fam.param("lambda"));
    case TailCase::GammaVarying:
      return NormingPair::gamma_vary(fam.param("gamma"), fam.param("kappa"), fam.param("delta"));
  }
  throw UnsupportedError("norming_for: unclassified tail");
}

LimitLaw limit_law_for(const ExponentFamily& fam) {
  const TailClass tc = classify_tail(fam);
  switch (tc.kind) {
    case TailCase::Atom: return LimitLaw::corollary1_ii(tc.w_lower, tc.atom);
    case TailCase::RegularNoAtom: return LimitLaw::corollary1_i(tc.w_lower, tc.t, tc.s);
    case TailCase::Smith: return LimitLaw::reverted_gumbel_smith(fam.param("lambda"));
    case TailCase::GammaVarying:
      return LimitLaw::reverted_gumbel_gamma(fam.param("gamma"), fam.param("kappa"),
                                             fam.param("delta"),
                                             gamma_varying_tail_constant(fam));
  }
  throw UnsupportedError("limit_law_for: unclassified tail");
}

double asymptotic_log_survivor(const ExponentFamily& fam, double x, double y) {
  require(x > 0.0 && y > 0.0, "asymptotic_log_survivor: x, y must be > 0");
  const TailClass tc = classify_tail(fam);
  const double w = y / (x + y);
  const double dw = w - tc.w_lower;
  switch (tc.kind) {
    case TailCase::Atom:
      return std::log1p(-tc.w_lower * tc.atom) - (x + y) * dw * tc.atom;
    case TailCase::RegularNoAtom:
      return -x * tc.s * std::pow(dw, tc.t + 2.0) /
             ((1.0 - tc.w_lower) * (tc.t + 1.0) * (tc.t + 2.0));
    case TailCase::Smith: {
      const double lambda = fam.param("lambda");
      const double c = lambda * std::exp(-lambda * lambda / 8.0);
      const double l = std::log(y / x) / lambda;
      return -c * std::sqrt(x * y) * std_normal_pdf(l) / (l * l);
    }
    case TailCase::GammaVarying: {
      const double g = fam.param("gamma"), k = fam.param("kappa");
      const double log_f = (1.0 + g) * std::log(dw) - std::log(k * g);
      return -std::exp(std::log(x + y) + 2.0 * log_f + log_spectral_density(fam, w));
    }
  }
  throw UnsupportedError("asymptotic_log_survivor: unclassified tail");
}

ConvergencePoint convergence_distance(const ExponentFamily& fam, double u, int grid) {
  return convergence_distance(fam, norming_for(fam), limit_law_for(fam), u, grid);
}

ConvergencePoint convergence_distance(const ExponentFamily& fam, const NormingPair& np,
                                      const LimitLaw& g, double u, int grid) {
  require(u > 0.0, "convergence_distance: u must be > 0");
  require(grid >= 2, "convergence_distance: grid needs at least two points");
  const ImsDistribution d(fam);
  const double a = np.a(u), b = np.b(u);
  const double z0 = g.quantile(0.001), z1 = g.quantile(0.999);
  ConvergencePoint out;
  out.u = u;
  for (int i = 0; i < grid; ++i) {
    const double z = z0 + (z1 - z0) * double(i) / double(grid - 1);
    const double y = a + b * z;
    double f = 0.0;
    if (y > 0.0) f = -std::expm1(log_conditional_survivor(d, y, u));
    const double dist = std::fabs(f - g.cdf(z));
    if (dist > out.distance) {
      out.distance = dist;
      out.z_at_sup = z;
    }
  }
  return out;
}

std::vector<PsiRow> ht_psi_check(const NormingPair& np, const std::vector<double>& x_grid,
                                 const std::vector<double>& t_grid) {
  std::vector<PsiRow> rows;
  for (double t : t_grid) {
    const double at = np.a(t), bt = np.b(t);
    for (double x : x_grid) {
      rows.push_back({t, x, np.b(t + x) / bt, (np.a(t + x) - at) / bt});
    }
  }
  return rows;
}

double lemma1_path_y(double x, double w_lower) {
  require(x > 0.0, "lemma1_path_y: x must be > 0");
  require(w_lower >= 0.0 && w_lower < 0.5, "lemma1_path_y: w_lower must lie in [0, 1/2)");
  // With s = x + y: (1 - w_l) s - sqrt(s) - x = 0.
  const double c = 1.0 - w_lower;
  const double r = (1.0 + std::sqrt(1.0 + 4.0 * c * x)) / (2.0 * c);
  return r * r - x;
}

}  // namespace invms
