#include "invms/ims.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invms/error.hpp"

namespace invms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Survivor evaluation that steps off an atom ray to the right-hand value.
double log_survivor_right(const ImsDistribution& d, double y, double x) {
  try {
    return log_conditional_survivor(d, y, x);
  } catch (const BoundaryError&) {
    return log_conditional_survivor(d, std::nextafter(y, kInf), x);
  }
}

}  // namespace

double joint_survivor(const ImsDistribution& d, double x, double y) {
  if (!(x >= 0.0 && y >= 0.0)) throw DomainError("joint_survivor: arguments must be >= 0");
  if (x == 0.0 && y == 0.0) return 1.0;
  const double ix = x == 0.0 ? kInf : 1.0 / x;
  const double iy = y == 0.0 ? kInf : 1.0 / y;
  return std::exp(-v(d.family(), ix, iy));
}

double log_conditional_survivor(const ImsDistribution& d, double y, double given_x) {
  if (!(given_x > 0.0) || !(y >= 0.0) || std::isnan(y))
    throw DomainError("conditional_survivor: need x > 0 and y >= 0");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return -kInf;
  const double x = given_x;
  const double r = x / y;
  const double dv = -v1(d.family(), 1.0, r);
  if (!(dv > 0.0)) return -kInf;
  const double vv = v(d.family(), 1.0, r);
  return std::min(0.0, std::log(dv) + x * (1.0 - vv));
}

double conditional_survivor(const ImsDistribution& d, double y, double given_x) {
  return std::exp(log_conditional_survivor(d, y, given_x));
}

double exceedance_conditional_survivor(const ImsDistribution& d, double y, double u) {
  if (!(u >= 0.0)) throw DomainError("exceedance_conditional_survivor: u must be >= 0");
  return std::exp(u) * joint_survivor(d, u, y);
}

double conditional_quantile_exact(const ImsDistribution& d, double p, double given_x,
                                  double tol) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("conditional_quantile: p must lie in (0, 1)");
  if (!(given_x > 0.0)) throw DomainError("conditional_quantile: x must be > 0");
  const double target = std::log1p(-p);
  auto f = [&](double t) { return log_survivor_right(d, std::exp(t), given_x) - target; };

  // f decreases in t = log y: find lo with f > 0 and hi with f < 0.
  double lo = std::log(given_x) - 1.0, hi = std::log(given_x) + 1.0;
  double step = 1.0;
  int guard = 0;
  while (f(lo) < 0.0) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    if (++guard > 60 || lo < -700.0)
      throw NumericError("conditional_quantile: no lower bracket for p = " + std::to_string(p));
  }
  step = 1.0;
  guard = 0;
  while (f(hi) > 0.0) {
    lo = std::max(lo, hi);
    hi += step;
    step *= 2.0;
    if (++guard > 60 || hi > 700.0)
      throw NumericError("conditional_quantile: no upper bracket for p = " + std::to_string(p));
  }
  try {
    return std::exp(find_root(f, lo, hi, tol));
  } catch (const BracketError& e) {
    throw NumericError(std::string("conditional_quantile: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

MarginSpec MarginSpec::unit_exponential() { return {}; }

MarginSpec MarginSpec::unit_frechet() {
  MarginSpec m;
  m.kind_ = MarginKind::UnitFrechet;
  return m;
}

MarginSpec MarginSpec::pareto(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("pareto margin: alpha must be > 0");
  MarginSpec m;
  m.kind_ = MarginKind::Pareto;
  m.alpha_ = alpha;
  return m;
}

MarginSpec MarginSpec::empirical(std::vector<double> values) {
  if (values.size() < 2) throw DataError("empirical margin: need at least two values");
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !(values[i] > values[i - 1]))
      throw DataError("empirical margin: values must be finite and distinct");
  }
  MarginSpec m;
  m.kind_ = MarginKind::Empirical;
  m.table_ = std::move(values);
  return m;
}

double MarginSpec::to_exponential(double y) const {
  switch (kind_) {
    case MarginKind::UnitExponential:
      return y;
    case MarginKind::UnitFrechet:
      // -log{1 - exp(-1/y)}
      return y <= 0.0 ? 0.0 : -std::log(-std::expm1(-1.0 / y));
    case MarginKind::Pareto:
      return y <= 1.0 ? 0.0 : alpha_ * std::log(y);
    case MarginKind::Empirical: {
      const double n1 = double(table_.size() + 1);
      const std::size_t n = table_.size();
      double f;
      if (y <= table_.front()) {
        const double slope = (1.0 / n1) / (table_[1] - table_[0]);
        f = 1.0 / n1 + slope * (y - table_.front());
      } else if (y >= table_.back()) {
        const double slope = (1.0 / n1) / (table_[n - 1] - table_[n - 2]);
        f = double(n) / n1 + slope * (y - table_.back());
      } else {
        auto it = std::upper_bound(table_.begin(), table_.end(), y);
        const std::size_t k = std::size_t(it - table_.begin());  // table_[k-1] <= y < table_[k]
        const double t = (y - table_[k - 1]) / (table_[k] - table_[k - 1]);
        f = (double(k) + t) / n1;
      }
      if (f <= 0.0) return 0.0;
      if (f >= 1.0) return kInf;
      return -std::log1p(-f);
    }
  }
  return y;
}

double MarginSpec::from_exponential(double x) const {
  if (!(x >= 0.0)) throw DomainError("margin transform: exponential value must be >= 0");
  switch (kind_) {
    case MarginKind::UnitExponential:
      return x;
    case MarginKind::UnitFrechet:
      return -1.0 / std::log(-std::expm1(-x));
    case MarginKind::Pareto:
      return std::exp(x / alpha_);
    case MarginKind::Empirical: {
      const double n1 = double(table_.size() + 1);
      const std::size_t n = table_.size();
      const double f = -std::expm1(-x);
      const double pos = f * n1;  // fractional 1-based index
      if (pos <= 1.0) {
        return table_[0] - (1.0 - pos) * (table_[1] - table_[0]);
      }
      if (pos >= double(n)) {
        return table_[n - 1] + (pos - double(n)) * (table_[n - 1] - table_[n - 2]);
      }
      const std::size_t k = std::size_t(std::floor(pos));
      const double t = pos - double(k);
      return table_[k - 1] + t * (table_[k] - table_[k - 1]);
    }
  }
  return x;
}

std::vector<Pair> transform_margins(const std::vector<Pair>& sample, const MarginSpec& m1,
                                    const MarginSpec& m2) {
  std::vector<Pair> out;
  out.reserve(sample.size());
  for (const auto& [x, y] : sample) out.emplace_back(m1.from_exponential(x), m2.from_exponential(y));
  return out;
}

std::vector<Pair> to_exponential_margins(const std::vector<Pair>& sample,
                                         const MarginSpec& m1, const MarginSpec& m2) {
  std::vector<Pair> out;
  out.reserve(sample.size());
  for (const auto& [x, y] : sample) out.emplace_back(m1.to_exponential(x), m2.to_exponential(y));
  return out;
}

std::vector<ChiRow> chi_bar_diagnostics(const ImsDistribution& d,
                                        const std::vector<double>& probs) {
  std::vector<ChiRow> rows;
  rows.reserve(probs.size());
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chi_bar_diagnostics: probabilities must lie in (0, 1)");
    const double q = -std::log1p(-p);
    // log joint = -q V(1, 1) exactly; keep it in log form for large q.
    const double log_joint = -v(d.family(), 1.0 / q, 1.0 / q);
    ChiRow r;
    r.p = p;
    r.q = q;
    r.joint = std::exp(log_joint);
    r.chi = std::exp(log_joint + q);
    r.eta = -q / log_joint;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace invms
