#include "invms/variation.hpp"

#include <algorithm>
#include <cmath>

#include "invms/error.hpp"

namespace invms {

namespace {

// Nonincreasing within a relative slack that absorbs rounding noise.
bool nonincreasing(const std::vector<double>& v, std::size_t from) {
  for (std::size_t i = from + 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] * (1.0 + 1e-9) + 1e-15) return false;
  }
  return true;
}

}  // namespace

SlowlyVaryingReport slowly_varying_condition(const RealFn& L, const std::vector<double>& tau_grid,
                                             int k_min, int k_max) {
  if (tau_grid.empty()) throw DomainError("slowly_varying_condition: empty tau grid");
  if (k_max <= k_min) throw DomainError("slowly_varying_condition: need k_max > k_min");
  SlowlyVaryingReport rep;
  rep.pass = true;
  for (double tau : tau_grid) {
    if (!(tau > 0.0 && tau < 1.0))
      throw DomainError("slowly_varying_condition: tau must lie in (0, 1)");
    std::vector<double> dev;
    for (int k = k_min; k <= k_max; ++k) {
      const double w = std::pow(10.0, -k);
      const double lw = L(w);
      if (!(lw > 0.0)) throw DomainError("slowly_varying_condition: L(w) must be positive");
      const double arg = w * std::pow(lw, -tau);
      const double la = L(arg);
      if (!(la > 0.0)) throw DomainError("slowly_varying_condition: L must be positive");
      const double ratio = la / lw;
      rep.rows.push_back({tau, w, ratio});
      dev.push_back(std::fabs(ratio - 1.0));
    }
    rep.first_deviation.push_back(dev.front());
    rep.last_deviation.push_back(dev.back());
    const bool ok = nonincreasing(dev, dev.size() / 2) && dev.back() <= dev.front() + 1e-15;
    if (!ok) {
      rep.pass = false;
      rep.note = "ratio drifts away from 1 as w decreases (tau = " + std::to_string(tau) + ")";
    }
  }
  return rep;
}

GammaVariationReport gamma_variation_check(const RealFn& log_g, const RealFn& f,
                                           const std::vector<double>& s_grid,
                                           const std::vector<double>& z_grid, double threshold) {
  if (s_grid.size() < 2 || z_grid.empty())
    throw DomainError("gamma_variation_check: need at least two s values and one z value");
  std::vector<double> s_sorted = s_grid;
  std::sort(s_sorted.begin(), s_sorted.end(), std::greater<>());
  GammaVariationReport rep;
  std::vector<double> worst, f_ratio;
  for (double s : s_sorted) {
    if (!(s > 0.0)) throw DomainError("gamma_variation_check: s must be > 0");
    const double fs = f(s);
    const double lg = log_g(s);
    double w = 0.0;
    for (double z : z_grid) {
      const double arg = s + z * fs;
      if (!(arg > 0.0)) throw DomainError("gamma_variation_check: s + z f(s) must be > 0");
      const double log_ratio = log_g(arg) - lg;
      const double dev = std::fabs(std::expm1(log_ratio - z));
      rep.rows.push_back({s, z, std::exp(log_ratio), dev});
      w = std::max(w, dev);
    }
    worst.push_back(w);
    f_ratio.push_back(std::fabs(fs / s));
  }
  rep.smallest_s = s_sorted.back();
  rep.max_deviation_at_smallest = worst.back();
  rep.f_over_s_at_smallest = f_ratio.back();
  rep.deviation_decreasing = nonincreasing(worst, worst.size() / 2) && worst.back() < worst.front();
  rep.f_over_s_decreasing = nonincreasing(f_ratio, 0) && f_ratio.back() < f_ratio.front();
  rep.pass = rep.max_deviation_at_smallest < threshold && rep.deviation_decreasing &&
             rep.f_over_s_decreasing;
  if (!rep.pass) {
    if (rep.max_deviation_at_smallest >= threshold) rep.note = "deviation at smallest s above threshold";
    else if (!rep.deviation_decreasing) rep.note = "deviation not decreasing along the s sweep";
    else rep.note = "f(s)/s not decreasing";
  }
  return rep;
}

Lemma2Report lemma2_expansion_check(const RealFn& U, const RealFn& log_g, const RealFn& f,
                                    const std::vector<double>& w_grid, double tolerance) {
  if (w_grid.empty()) throw DomainError("lemma2_expansion_check: empty w grid");
  std::vector<double> ws = w_grid;
  std::sort(ws.begin(), ws.end(), std::greater<>());
  Lemma2Report rep;
  bool all_converged = true;
  for (double w : ws) {
    if (!(w > 0.0)) throw DomainError("lemma2_expansion_check: w must be > 0");
    const double fw = f(w), uw = U(w), lgw = log_g(w);
    if (!(fw > 0.0) || !(uw > 0.0))
      throw DomainError("lemma2_expansion_check: U(w) and f(w) must be positive");
    const double T = w / fw;
    auto integrand = [&](double tau) {
      const double s = w - fw * tau;
      if (!(s > 0.0)) return 0.0;
      const double e = log_g(s) - lgw;
      if (e < -745.0) return 0.0;
      return U(s) / uw * std::exp(e);
    };
    QuadratureSpec spec{1e-14, 1e-11, 4000};
    double value = 0.0;
    bool converged = true;
    const double cut = std::min(T, 80.0);
    for (auto [lo, hi] : {std::pair{0.0, cut}, std::pair{cut, T}}) {
      if (!(hi > lo)) continue;
      try {
        value += integrate(integrand, lo, hi, spec).value;
      } catch (const ConvergenceError& e) {
        value += e.best_estimate();
        converged = false;
      }
    }
    all_converged = all_converged && converged;
    rep.rows.push_back({w, value, converged});
  }
  rep.ratio_at_smallest = rep.rows.back().ratio;
  rep.pass = std::fabs(rep.ratio_at_smallest - 1.0) <= tolerance;
  if (!all_converged) rep.note = "quadrature did not converge at some w; best estimates reported";
  else if (!rep.pass) rep.note = "ratio at smallest w differs from 1 by more than the tolerance";
  return rep;
}

}  // namespace invms
