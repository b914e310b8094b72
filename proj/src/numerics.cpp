#include "invms/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "invms/error.hpp"

namespace invms {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double poly(const std::array<double, 8>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_std_normal_cdf(double x) {
  if (x > -30.0) return std::log(std_normal_cdf(x));
  // Mills ratio series: Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 ...)
  const double x2 = x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 8; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    sum += term;
  }
  return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(sum);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("std_normal_quantile: p must lie in [0,1]");
  }
  static constexpr std::array<double, 8> a{
      3.3871328727963666080e0,     1.3314166789178437745e+2,
      1.9715909503065514427e+3,    1.3731693765509461125e+4,
      4.5921953931549871457e+4,    6.7265770927008700853e+4,
      3.3430575583588128105e+4,    2.5090809287301226727e+3};
  static constexpr std::array<double, 8> b{
      1.0,                         4.2313330701600911252e+1,
      6.8718700749205790830e+2,    5.3941960214247511077e+3,
      2.1213794301586595867e+4,    3.9307895800092710610e+4,
      2.8729085735721942674e+4,    5.2264952788528545610e+3};
  static constexpr std::array<double, 8> c{
      1.42343711074968357734e0,    4.63033784615654529590e0,
      5.76949722146069140550e0,    3.64784832476320460504e0,
      1.27045825245236838258e0,    2.41780725177450611770e-1,
      2.27238449892691845833e-2,   7.74545014278341407640e-4};
  static constexpr std::array<double, 8> d{
      1.0,                         2.05319162663775882187e0,
      1.67638483018380384940e0,    6.89767334985100004550e-1,
      1.48103976427480074590e-1,   1.51986665636164571966e-2,
      5.47593808499534494600e-4,   1.05075007164441684324e-9};
  static constexpr std::array<double, 8> e{
      6.65790464350110377720e0,    5.46378491116411436990e0,
      1.78482653991729133580e0,    2.96560571828504891230e-1,
      2.65321895265761230930e-2,   1.24266094738807843860e-3,
      2.71155556874348757815e-5,   2.01033439929228813265e-7};
  static constexpr std::array<double, 8> f{
      1.0,                         5.99832206555887937690e-1,
      1.36929880922735805310e-1,   1.48753612908506148525e-2,
      7.86869131145613259100e-4,   1.84631831751005468180e-5,
      1.42151175831644588870e-7,   2.04426310338993978564e-15};

  const double q = p - 0.5;
  double z;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    z = q * poly(a, r) / poly(b, r);
  } else {
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      z = poly(c, r) / poly(d, r);
    } else {
      r -= 5.0;
      z = poly(e, r) / poly(f, r);
    }
    if (q < 0.0) z = -z;
  }
  // One Halley step against erfc removes residual coefficient error.
  const double resid = q < 0.0 ? std_normal_cdf(z) - p : (1.0 - p) - std_normal_sf(z);
  const double u = resid * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
  if (std::isfinite(u)) z -= u / (1.0 + 0.5 * z * u);
  return z;
}

// Continued fraction for the incomplete beta (modified Lentz).
namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 2000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_pdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("student_t_pdf: dof must be > 0");
  const double lc = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                    0.5 * std::log(dof * std::numbers::pi);
  return std::exp(lc - 0.5 * (dof + 1.0) * std::log1p(x * x / dof));
}

double student_t_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("student_t_cdf: dof must be > 0");
  if (x == 0.0) return 0.5;
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double x2 = x * x;
  double tail;
  // Two equivalent incomplete-beta forms; pick the one without cancellation.
  if (x2 < dof) {
    const double central = incomplete_beta(0.5, 0.5 * dof, x2 / (dof + x2));
    tail = 0.5 * (1.0 - central);
  } else {
    tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, dof / (dof + x2));
  }
  return x > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
  if (!(dof > 0.0)) throw DomainError("student_t_quantile: dof must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p in (0,1)");
  if (p == 0.5) return 0.0;
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, dof) > p) lo *= 2.0;
  while (student_t_cdf(hi, dof) < p) hi *= 2.0;
  return find_root([&](double t) { return student_t_cdf(t, dof) - p; }, lo, hi,
                   1e-14 * std::max(1.0, std::fabs(hi)));
}

// ---------------------------------------------------------------------------

void QuadratureSpec::check() const {
  if (!(abs_tol > 0.0)) throw DomainError("QuadratureSpec: abs_tol must be > 0");
  if (!(rel_tol >= 0.0)) throw DomainError("QuadratureSpec: rel_tol must be >= 0");
  if (max_subdivisions < 1)
    throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
}

namespace {

constexpr std::array<double, 11> kXgk{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208932299624, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod_segment(const RealFn& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double s = f(center - dx) + f(center + dx);
    resk += kWgk[j] * s;
    if (j % 2 == 1) resg += kWg[j / 2] * s;
  }
  if (!std::isfinite(resk)) {
    throw NumericError("integrate: non-finite integrand value");
  }
  const double value = resk * half;
  const double error = std::fabs((resk - resg) * half);
  return {lo, hi, value, error};
}

}  // namespace

double gauss_kronrod21(const RealFn& f, double lo, double hi) {
  return kronrod_segment(f, lo, hi).value;
}

QuadratureResult integrate(const RealFn& f, double lo, double hi,
                           const QuadratureSpec& spec) {
  spec.check();
  if (!(lo < hi)) {
    if (lo == hi) return {};
    throw DomainError("integrate: requires lo < hi");
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod_segment(f, lo, hi);
  heap.push(first);
  double total = first.value, total_err = first.error;
  int subdivisions = 0;
  auto done = [&] {
    return total_err <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
  };
  while (!done()) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "integrate: no convergence after " << subdivisions
          << " subdivisions on [" << lo << ", " << hi << "], error estimate "
          << total_err;
      throw ConvergenceError(msg.str(), total, total_err);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval exhausted at machine resolution; accept what we have.
      total_err -= worst.error;
      worst.error = 0.0;
      heap.push(worst);
      if (heap.top().error == 0.0) break;
      continue;
    }
    Segment left = kronrod_segment(f, worst.lo, mid);
    Segment right = kronrod_segment(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
    if (subdivisions % 64 == 0) {
      // Re-sum to stop drift from the running updates.
      std::vector<Segment> all;
      all.reserve(heap.size());
      total = 0.0;
      total_err = 0.0;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (const auto& s : all) {
        total += s.value;
        total_err += s.error;
        heap.push(s);
      }
    }
  }
  return {total, total_err, subdivisions};
}

QuadratureResult integrate_to_infinity(const RealFn& f, double lo,
                                       const QuadratureSpec& spec) {
  auto g = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = lo + t / one_minus;
    if (!std::isfinite(x)) return 0.0;
    const double val = f(x) / (one_minus * one_minus);
    return std::isfinite(val) ? val : 0.0;
  };
  return integrate(g, 0.0, 1.0, spec);
}

// ---------------------------------------------------------------------------

double find_root(const RealFn& f, double lo, double hi, double tol, int max_iter) {
  if (lo > hi) std::swap(lo, hi);
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f = " << fa
        << ", " << fb << ")";
    throw BracketError(msg.str());
  }
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if (std::isnan(fb)) throw NumericError("find_root: objective returned NaN");
  }
  throw ConvergenceError("find_root: iteration limit reached", b, std::fabs(c - b));
}

// ---------------------------------------------------------------------------

namespace {

struct NelderMeadRun {
  std::vector<double> best;
  double value;
  bool converged;
  int evals;
};

NelderMeadRun nelder_mead(const ObjectiveFn& raw, std::vector<double> start,
                          std::span<const double> scale, const MinimizeOptions& opts,
                          int budget) {
  const std::size_t n = start.size();
  int evals = 0;
  auto obj = [&](const std::vector<double>& p) {
    ++evals;
    const double v = raw(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale[i];
  for (std::size_t i = 0; i <= n; ++i) values[i] = obj(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (evals < budget) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t lo = order.front(), hi = order.back(), nh = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        diameter = std::max(diameter, std::fabs(simplex[i][k] - simplex[lo][k]));
      }
    }
    const double spread = std::fabs(values[hi] - values[lo]);
    if (std::isfinite(values[hi]) &&
        spread <= opts.f_tol * (std::fabs(values[lo]) + std::fabs(values[hi])) + 1e-300 &&
        diameter <= opts.x_tol * (1.0 + std::fabs(simplex[lo][0]))) {
      converged = true;
      break;
    }
    if (diameter == 0.0) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / double(n);
    }
    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - simplex[hi][k]);
    const double fr = obj(trial);
    if (fr < values[lo]) {
      for (std::size_t k = 0; k < n; ++k)
        trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[hi][k]);
      const double fe = obj(trial2);
      if (fe < fr) {
        simplex[hi] = trial2;
        values[hi] = fe;
      } else {
        simplex[hi] = trial;
        values[hi] = fr;
      }
      continue;
    }
    if (fr < values[nh]) {
      simplex[hi] = trial;
      values[hi] = fr;
      continue;
    }
    const bool outside = fr < values[hi];
    for (std::size_t k = 0; k < n; ++k) {
      trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                          : centroid[k] + 0.5 * (simplex[hi][k] - centroid[k]);
    }
    const double fc = obj(trial2);
    if (fc < std::min(fr, values[hi])) {
      simplex[hi] = trial2;
      values[hi] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == lo) continue;
      for (std::size_t k = 0; k < n; ++k)
        simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
      values[i] = obj(simplex[i]);
    }
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  return {simplex[best], values[best], converged, evals};
}

}  // namespace

MinimizeResult minimize(const ObjectiveFn& obj, std::span<const double> init,
                        std::span<const double> scale, const MinimizeOptions& opts) {
  if (init.size() != scale.size() || init.empty()) {
    throw DomainError("minimize: init and scale must be non-empty and equal length");
  }
  std::vector<double> start(init.begin(), init.end());
  const double f0 = obj(start);
  if (!std::isfinite(f0)) throw DomainError("minimize: objective not finite at init");

  const int budget = std::max(1, opts.max_iter) * int(init.size() + 1);
  NelderMeadRun first = nelder_mead(obj, start, scale, opts, budget);
  NelderMeadRun second = nelder_mead(obj, first.best, scale, opts, budget);

  MinimizeResult out;
  out.evaluations = first.evals + second.evals + 1;
  if (second.value <= first.value) {
    out.point = second.best;
    out.value = second.value;
  } else {
    out.point = first.best;
    out.value = first.value;
  }
  out.converged = first.converged && second.converged;
  if (f0 < out.value) {
    out.point = start;
    out.value = f0;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed),
      index_(stream_index),
      key_(splitmix64_mix(seed + kGolden) ^
           splitmix64_mix(splitmix64_mix(stream_index + 0x632be59bd9b4e019ULL))) {}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

double RandomStream::uniform() noexcept {
  return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() noexcept { return -std::log(uniform()); }

}  // namespace invms
