#include "invms/exponent.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "invms/error.hpp"

namespace invms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// Shortest text that round-trips.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

// Spectral decomposition terms shared by every model: contribution of a point
// mass at w to V and V_1.
double atom_v(double w, double mass, double x, double y) {
  if (mass == 0.0) return 0.0;
  const double a = std::isinf(x) ? 0.0 : w / x;
  const double b = std::isinf(y) ? 0.0 : (1.0 - w) / y;
  return mass * std::max(a, b);
}

// ---------------------------------------------------------------------------

class SmithModel final : public detail::ExponentModel {
 public:
  explicit SmithModel(double lambda) : lambda_(lambda) {
    require(std::isfinite(lambda) && lambda > 0.0,
            "smith: lambda must lie in (0, inf), got " + fmt(lambda));
    params = {{"lambda", lambda}};
    label = "smith";
  }
  FamilyId id() const override { return FamilyId::Smith; }
  bool symmetric() const override { return true; }
  double v(double x, double y) const override {
    if (std::isinf(y)) return 1.0 / x;
    if (std::isinf(x)) return 1.0 / y;
    const double l = std::log(y / x) / lambda_;
    return std_normal_cdf(0.5 * lambda_ + l) / x + std_normal_cdf(0.5 * lambda_ - l) / y;
  }
  double v1(double x, double y) const override {
    if (std::isinf(y)) return -1.0 / (x * x);
    if (std::isinf(x)) return 0.0;
    return -std_normal_cdf(0.5 * lambda_ + std::log(y / x) / lambda_) / (x * x);
  }
  double density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return 0.0;
    return std::exp(log_density(w));
  }
  double log_density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return -kInf;
    const double a = 0.5 * lambda_ + (std::log1p(-w) - std::log(w)) / lambda_;
    return -0.5 * a * a - kLogSqrt2Pi - std::log(lambda_) - 2.0 * std::log(w) -
           std::log1p(-w);
  }
  EndpointAtoms atoms() const override { return {0.0, 0.0}; }

 private:
  double lambda_;
};

class SchlatherModel final : public detail::ExponentModel {
 public:
  explicit SchlatherModel(double rho) : rho_(rho) {
    require(std::isfinite(rho) && rho > -1.0 && rho < 1.0,
            "schlather: rho must lie in (-1, 1), got " + fmt(rho));
    params = {{"rho", rho}};
    label = "schlather";
  }
  FamilyId id() const override { return FamilyId::Schlather; }
  bool symmetric() const override { return true; }
  double v(double x, double y) const override {
    if (std::isinf(y)) return 1.0 / x;
    if (std::isinf(x)) return 1.0 / y;
    const double s = x + y;
    const double q = 1.0 - 2.0 * (1.0 + rho_) * (x / s) * (y / s);
    return 0.5 * (1.0 / x + 1.0 / y) * (1.0 + std::sqrt(q));
  }
  double v1(double x, double y) const override {
    if (std::isinf(y)) return -1.0 / (x * x);
    if (std::isinf(x)) return 0.0;
    // R = sqrt(x^2 + y^2 - 2 rho x y), scaled to avoid overflow.
    const double m = std::max(x, y);
    const double xs = x / m, ys = y / m;
    const double r = std::sqrt(xs * xs + ys * ys - 2.0 * rho_ * xs * ys);
    return (rho_ * xs - ys - r) / (2.0 * x * x * r);
  }
  double density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return 0.0;
    const double q = 1.0 - 2.0 * (1.0 + rho_) * w * (1.0 - w);
    return (1.0 - rho_ * rho_) / (2.0 * q * std::sqrt(q));
  }
  EndpointAtoms atoms() const override {
    const double m = 0.5 * (1.0 - rho_);
    return {m, m};
  }

 private:
  double rho_;
};

class ExtremalTModel final : public detail::ExponentModel {
 public:
  ExtremalTModel(double nu, double rho) : nu_(nu), rho_(rho) {
    require(std::isfinite(nu) && nu > 0.0, "extremalt: nu must be > 0, got " + fmt(nu));
    require(std::isfinite(rho) && rho > -1.0 && rho < 1.0,
            "extremalt: rho must lie in (-1, 1), got " + fmt(rho));
    scale_ = std::sqrt((1.0 - rho * rho) / (nu + 1.0));
    atom_ = student_t_cdf(-rho / scale_, nu + 1.0);
    params = {{"nu", nu}, {"rho", rho}};
    label = "extremalt";
  }
  FamilyId id() const override { return FamilyId::ExtremalT; }
  double v(double x, double y) const override {
    if (std::isinf(y)) return 1.0 / x;
    if (std::isinf(x)) return 1.0 / y;
    return student_t_cdf(arg(x, y), nu_ + 1.0) / x +
           student_t_cdf(arg(y, x), nu_ + 1.0) / y;
  }
  // The derivative terms of the two t-CDF arguments cancel, as for Husler-Reiss.
  double v1(double x, double y) const override {
    if (std::isinf(y)) return -1.0 / (x * x);
    if (std::isinf(x)) return 0.0;
    return -student_t_cdf(arg(x, y), nu_ + 1.0) / (x * x);
  }
  double density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return 0.0;
    return std::exp(log_density(w));
  }
  double log_density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return -kInf;
    const double lx = std::log(w), ly = std::log1p(-w);
    const double log_ratio = (ly - lx) / nu_;
    const double d = nu_ + 1.0;
    // log(1 + z^2 / d) without overflow when the ratio is huge.
    double log_kernel;
    if (log_ratio < 300.0) {
      const double z = (std::exp(log_ratio) - rho_) / scale_;
      log_kernel = std::log1p(z * z / d);
    } else {
      log_kernel = 2.0 * (log_ratio - std::log(scale_)) - std::log(d);
    }
    const double log_pdf = std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5 * d) -
                           0.5 * std::log(d * std::numbers::pi) - 0.5 * (d + 1.0) * log_kernel;
    return log_pdf + log_ratio - std::log(nu_ * scale_) - 2.0 * lx - ly;
  }
  bool symmetric() const override { return true; }
  EndpointAtoms atoms() const override { return {atom_, atom_}; }

 private:
  double arg(double x, double y) const {
    return (std::pow(y / x, 1.0 / nu_) - rho_) / scale_;
  }
  double nu_, rho_, scale_, atom_;
};

class MixedLogisticModel final : public detail::ExponentModel {
 public:
  explicit MixedLogisticModel(double theta) : theta_(theta) {
    require(std::isfinite(theta) && theta > 0.0 && theta < 1.0,
            "mixedlogistic: theta must lie in (0, 1), got " + fmt(theta));
    params = {{"theta", theta}};
    label = "mixedlogistic";
  }
  FamilyId id() const override { return FamilyId::MixedLogistic; }
  bool symmetric() const override { return true; }
  double v(double x, double y) const override {
    if (std::isinf(y)) return 1.0 / x;
    if (std::isinf(x)) return 1.0 / y;
    return 1.0 / x + 1.0 / y - theta_ / (x + y);
  }
  double v1(double x, double y) const override {
    if (std::isinf(y)) return -1.0 / (x * x);
    if (std::isinf(x)) return 0.0;
    const double s = x + y;
    return -1.0 / (x * x) + theta_ / (s * s);
  }
  double density(double w) const override {
    return (w > 0.0 && w < 1.0) ? 2.0 * theta_ : 0.0;
  }
  EndpointAtoms atoms() const override { return {1.0 - theta_, 1.0 - theta_}; }

 private:
  double theta_;
};

class AsymmetricLogisticModel final : public detail::ExponentModel {
 public:
  AsymmetricLogisticModel(double theta, double phi, double alpha)
      : theta_(theta), phi_(phi), alpha_(alpha) {
    require(std::isfinite(theta) && theta >= 0.0 && theta <= 1.0,
            "asymmetriclogistic: theta must lie in [0, 1], got " + fmt(theta));
    require(std::isfinite(phi) && phi >= 0.0 && phi <= 1.0,
            "asymmetriclogistic: phi must lie in [0, 1], got " + fmt(phi));
    require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0,
            "asymmetriclogistic: alpha must lie in (0, 1], got " + fmt(alpha));
    params = {{"theta", theta}, {"phi", phi}, {"alpha", alpha}};
    label = "asymmetriclogistic";
  }
  FamilyId id() const override { return FamilyId::AsymmetricLogistic; }
  double v(double x, double y) const override {
    double out = 0.0;
    if (!std::isinf(x)) out += (1.0 - theta_) / x;
    if (!std::isinf(y)) out += (1.0 - phi_) / y;
    return out + std::exp(alpha_ * log_s(x, y));
  }
  double v1(double x, double y) const override {
    if (std::isinf(x)) return 0.0;
    const double lead = -(1.0 - theta_) / (x * x);
    if (theta_ == 0.0) return lead;
    const double ls = log_s(x, y);
    return lead - std::exp((alpha_ - 1.0) * ls + (std::log(theta_) - std::log(x)) / alpha_) / x;
  }
  double density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return 0.0;
    return std::exp(log_density(w));
  }
  double log_density(double w) const override {
    if (!(w > 0.0 && w < 1.0)) return -kInf;
    return log_density_xy(w, 1.0 - w);
  }
  double density_reflected(double y) const override {
    if (!(y > 0.0 && y < 1.0)) return 0.0;
    return std::exp(log_density_xy(1.0 - y, y));
  }
  // alpha = 1 or theta * phi = 0 collapses V to independence.
  EndpointAtoms atoms() const override {
    if (alpha_ == 1.0 || theta_ == 0.0 || phi_ == 0.0) return {1.0, 1.0};
    return {1.0 - phi_, 1.0 - theta_};
  }

 private:
  // log{(theta/x)^(1/alpha) + (phi/y)^(1/alpha)}
  double log_s(double x, double y) const {
    const double a = (theta_ == 0.0 || std::isinf(x))
                         ? -kInf
                         : (std::log(theta_) - std::log(x)) / alpha_;
    const double b = (phi_ == 0.0 || std::isinf(y)) ? -kInf
                                                    : (std::log(phi_) - std::log(y)) / alpha_;
    return log_add_exp(a, b);
  }
  double log_density_xy(double x, double y) const {
    if (alpha_ == 1.0 || theta_ == 0.0 || phi_ == 0.0) return -kInf;
    const double lx = std::log(x), ly = std::log(y);
    const double ls = log_s(x, y);
    return std::log((1.0 - alpha_) / alpha_) + (alpha_ - 2.0) * ls +
           (std::log(theta_) - lx) / alpha_ + (std::log(phi_) - ly) / alpha_ - lx - ly;
  }
  double theta_, phi_, alpha_;
};

class AsymmetricMixedModel final : public detail::ExponentModel {
 public:
  AsymmetricMixedModel(double theta, double phi) : theta_(theta), phi_(phi) {
    require(std::isfinite(theta) && std::isfinite(phi), "asymmetricmixed: non-finite parameter");
    require(theta >= 0.0, "asymmetricmixed: theta must be >= 0, got " + fmt(theta));
    require(theta + 3.0 * phi > 0.0,
            "asymmetricmixed: theta + 3 phi must be > 0, got " + fmt(theta + 3.0 * phi));
    require(theta + phi <= 1.0,
            "asymmetricmixed: theta + phi must be <= 1, got " + fmt(theta + phi));
    require(theta + 2.0 * phi <= 1.0,
            "asymmetricmixed: theta + 2 phi must be <= 1, got " + fmt(theta + 2.0 * phi));
    params = {{"theta", theta}, {"phi", phi}};
    label = "asymmetricmixed";
  }
  FamilyId id() const override { return FamilyId::AsymmetricMixed; }
  double v(double x, double y) const override {
    if (std::isinf(y)) return 1.0 / x;
    if (std::isinf(x)) return 1.0 / y;
    const double s = x + y;
    return 1.0 / x + 1.0 / y - ((theta_ + phi_) * y + (theta_ + 2.0 * phi_) * x) / (s * s);
  }
  double v1(double x, double y) const override {
    if (std::isinf(y)) return -1.0 / (x * x);
    if (std::isinf(x)) return 0.0;
    const double s = x + y;
    const double n = (theta_ + phi_) * y + (theta_ + 2.0 * phi_) * x;
    return -1.0 / (x * x) - (theta_ + 2.0 * phi_) / (s * s) + 2.0 * n / (s * s * s);
  }
  double density(double w) const override {
    return (w > 0.0 && w < 1.0) ? 2.0 * theta_ + 6.0 * phi_ * w : 0.0;
  }
  EndpointAtoms atoms() const override {
    return {1.0 - theta_ - phi_, 1.0 - theta_ - 2.0 * phi_};
  }

 private:
  double theta_, phi_;
};

class MarshallOlkinModel final : public detail::ExponentModel {
 public:
  explicit MarshallOlkinModel(double alpha) : alpha_(alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
            "marshallolkin: alpha must lie in [0, 1], got " + fmt(alpha));
    params = {{"alpha", alpha}};
    label = "marshallolkin";
  }
  FamilyId id() const override { return FamilyId::MarshallOlkin; }
  bool symmetric() const override { return true; }
  double v(double x, double y) const override {
    const double ix = std::isinf(x) ? 0.0 : 1.0 / x;
    const double iy = std::isinf(y) ? 0.0 : 1.0 / y;
    return alpha_ * (ix + iy) + (1.0 - alpha_) * std::max(ix, iy);
  }
  double v1(double x, double y) const override {
    if (std::isinf(x)) return 0.0;
    const double base = -1.0 / (x * x);
    if (x < y) return base;
    if (x > y) return alpha_ * base;
    if (alpha_ == 1.0) return base;
    throw BoundaryError("marshallolkin: V_1 undefined on the ray x = y (atom at w = 1/2)");
  }
  double density(double) const override { return 0.0; }
  EndpointAtoms atoms() const override { return {alpha_, alpha_}; }
  SpectralSupport support() const override {
    return alpha_ > 0.0 ? SpectralSupport{0.0, 1.0} : SpectralSupport{0.5, 0.5};
  }
  std::vector<InteriorAtom> interior_atoms() const override {
    if (alpha_ == 1.0) return {};
    return {{0.5, 2.0 * (1.0 - alpha_)}};
  }

 private:
  double alpha_;
};

class LogisticModel final : public detail::ExponentModel {
 public:
  explicit LogisticModel(double alpha) : alpha_(alpha) {
    require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0,
            "logistic: alpha must lie in (0, 1], got " + fmt(alpha));
    params = {{"alpha", alpha}};
    label = "logistic";
  }
  FamilyId id() const override { return FamilyId::Logistic; }
  bool symmetric() const override { return true; }
  double v(double x, double y) const override {
    return std::exp(alpha_ * log_s(x, y));
  }
  double v1(double x, double y) const override {
    if (std::isinf(x)) return 0.0;
    const double lx = -std::log(x) / alpha_;
    return -std::exp((alpha_ - 1.0) * log_s(x, y) + lx - std::log(x));
  }
  double density(double w) const override {
    if (!(w > 0.0 && w < 1.0) || alpha_ == 1.0) return 0.0;
    return std::exp(log_density(w));
  }
  double log_density(double w) const override {
    if (!(w > 0.0 && w < 1.0) || alpha_ == 1.0) return -kInf;
    const double lw = std::log(w), l1w = std::log1p(-w);
    return std::log((1.0 - alpha_) / alpha_) + (-1.0 - 1.0 / alpha_) * (lw + l1w) +
           (alpha_ - 2.0) * log_add_exp(-lw / alpha_, -l1w / alpha_);
  }
  EndpointAtoms atoms() const override {
    return alpha_ == 1.0 ? EndpointAtoms{1.0, 1.0} : EndpointAtoms{0.0, 0.0};
  }

 private:
  double log_s(double x, double y) const {
    const double a = std::isinf(x) ? -kInf : -std::log(x) / alpha_;
    const double b = std::isinf(y) ? -kInf : -std::log(y) / alpha_;
    return log_add_exp(a, b);
  }
  double alpha_;
};

struct GaussRule {
  std::vector<double> nodes, weights;
};

// Nodes by Newton iteration on the Legendre recurrence.
const GaussRule& gauss_legendre20() {
  static const GaussRule rule = [] {
    constexpr int n = 20;
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

// ---------------------------------------------------------------------------
// Models defined only through a spectral density. V and V_1 come from
// cumulative integrals of h and w h, tabulated on a logit grid at
// construction and completed inside a cell by Gauss-Kronrod.

class DensityModel : public detail::ExponentModel {
 public:
  DensityModel(std::function<double(double)> h, std::function<double(double)> log_h,
               SpectralSupport sup, EndpointAtoms atoms)
      : h_(std::move(h)), log_h_(std::move(log_h)), sup_(sup), atoms_(atoms) {
    require(sup.lower >= 0.0 && sup.upper <= 1.0 && sup.lower < 0.5 && sup.upper > 0.5,
            "density family: support must satisfy 0 <= w_l < 1/2 < w_u <= 1");
    require(atoms.lower >= 0.0 && atoms.lower <= 2.0 && atoms.upper >= 0.0 &&
                atoms.upper <= 2.0,
            "density family: atom masses must lie in [0, 2]");
  }

  double v(double x, double y) const override {
    const double ws = split(x, y);
    const auto [m0, m1] = cumulative(ws);
    double out = 0.0;
    if (!std::isinf(x)) out += (total1_ - m1) / x;
    if (!std::isinf(y)) out += (m0 - m1) / y;
    out += atom_v(sup_.lower, atoms_.lower, x, y) + atom_v(sup_.upper, atoms_.upper, x, y);
    return out;
  }
  double v1(double x, double y) const override {
    if (std::isinf(x)) return 0.0;
    const double ws = split(x, y);
    const auto [m0, m1] = cumulative(ws);
    (void)m0;
    double upper_moment = total1_ - m1;
    for (const auto& [w, mass] : {std::pair{sup_.lower, atoms_.lower},
                                  std::pair{sup_.upper, atoms_.upper}}) {
      if (mass == 0.0) continue;
      if (w > ws) upper_moment += w * mass;
      else if (w == ws) throw BoundaryError("density family: V_1 on an atom ray");
    }
    return -upper_moment / (x * x);
  }
  double density(double w) const override {
    if (!(w > sup_.lower && w < sup_.upper)) return 0.0;
    return h_(w);
  }
  double log_density(double w) const override {
    if (!(w > sup_.lower && w < sup_.upper)) return -kInf;
    return log_h_ ? log_h_(w) : std::log(h_(w));
  }
  EndpointAtoms atoms() const override { return atoms_; }
  SpectralSupport support() const override { return sup_; }

 protected:
  void tabulate() {
    constexpr int kCells = 1600;
    constexpr double kT = 40.0;
    const double width = sup_.upper - sup_.lower;
    nodes_.resize(kCells + 3);
    nodes_.front() = sup_.lower;
    nodes_.back() = sup_.upper;
    for (int k = 0; k <= kCells; ++k) {
      const double t = -kT + 2.0 * kT * double(k) / kCells;
      nodes_[k + 1] = t <= 0.0 ? sup_.lower + width / (1.0 + std::exp(-t))
                               : sup_.upper - width / (1.0 + std::exp(t));
    }
    cum0_.assign(nodes_.size(), 0.0);
    cum1_.assign(nodes_.size(), 0.0);
    QuadratureSpec spec{1e-17, 1e-13, 400};
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      const double a = nodes_[k - 1], b = nodes_[k];
      double c0 = 0.0, c1 = 0.0;
      if (b > a) {
        c0 = integrate([&](double w) { return h_(w); }, a, b, spec).value;
        c1 = integrate([&](double w) { return w * h_(w); }, a, b, spec).value;
      }
      cum0_[k] = cum0_[k - 1] + c0;
      cum1_[k] = cum1_[k - 1] + c1;
    }
    total0_ = cum0_.back();
    total1_ = cum1_.back();
  }

  // Split point w* = x / (x + y) clamped to the support.
  double split(double x, double y) const {
    double ws;
    if (std::isinf(y)) ws = 0.0;
    else if (std::isinf(x)) ws = 1.0;
    else ws = 1.0 / (1.0 + y / x);
    return std::clamp(ws, sup_.lower, sup_.upper);
  }

  // (int_{w_l}^{w} h, int_{w_l}^{w} s h)
  std::pair<double, double> cumulative(double w) const {
    if (w <= sup_.lower) return {0.0, 0.0};
    if (w >= sup_.upper) return {total0_, total1_};
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), w);
    const std::size_t k = std::size_t(it - nodes_.begin()) - 1;
    const double a = nodes_[k];
    double c0 = cum0_[k], c1 = cum1_[k];
    if (w > a) {
      // Cells are narrow on the logit scale; one Gauss-Legendre pass shared
      // by both integrands is accurate to rounding there.
      const auto& rule = gauss_legendre20();
      const double half = 0.5 * (w - a), mid = 0.5 * (w + a);
      double p0 = 0.0, p1 = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = mid + half * rule.nodes[i];
        const double hv = h_(s) * rule.weights[i];
        p0 += hv;
        p1 += s * hv;
      }
      c0 += half * p0;
      c1 += half * p1;
    }
    return {c0, c1};
  }

  std::function<double(double)> h_;
  std::function<double(double)> log_h_;
  SpectralSupport sup_;
  EndpointAtoms atoms_;
  std::vector<double> nodes_, cum0_, cum1_;
  double total0_ = 0.0, total1_ = 0.0;
};

class CustomDensityModel final : public DensityModel {
 public:
  CustomDensityModel(std::function<double(double)> h, SpectralSupport sup,
                     EndpointAtoms atoms, std::string name)
      : DensityModel(std::move(h), nullptr, sup, atoms) {
    label = std::move(name);
    tabulate();
  }
  FamilyId id() const override { return FamilyId::Custom; }
};

class GammaVaryingModel final : public DensityModel {
 public:
  GammaVaryingModel(double gamma, double kappa, double delta)
      : DensityModel(nullptr, nullptr, {0.0, 1.0}, {0.0, 0.0}),
        gamma_(gamma), kappa_(kappa), delta_(delta) {
    require(std::isfinite(gamma) && gamma > 0.0,
            "gammavarying: gamma must be > 0, got " + fmt(gamma));
    require(std::isfinite(kappa) && kappa > 0.0,
            "gammavarying: kappa must be > 0, got " + fmt(kappa));
    require(std::isfinite(delta), "gammavarying: delta must be finite");
    params = {{"gamma", gamma}, {"kappa", kappa}, {"delta", delta}};
    label = "gammavarying";

    const double center = raw_log(0.5);
    QuadratureSpec spec{1e-16, 1e-14, 4000};
    const double half =
        integrate([&](double w) { return std::exp(raw_log(w) - center); }, 0.0, 0.5, spec)
            .value;
    log_c_ = std::log(2.0) - center - std::log(2.0 * half);
    h_ = [this](double w) { return std::exp(log_c_ + raw_log(w)); };
    log_h_ = [this](double w) { return log_c_ + raw_log(w); };
    tabulate();
  }
  FamilyId id() const override { return FamilyId::GammaVarying; }
  bool symmetric() const override { return true; }
  double tail_constant() const { return std::exp(log_c_); }

 private:
  double raw_log(double w) const {
    if (!(w > 0.0 && w < 1.0)) return -kInf;
    const double l0 = std::log(w), l1 = std::log1p(-w);
    return delta_ * (l0 + l1) -
           kappa_ * (std::exp(-gamma_ * l0) + std::exp(-gamma_ * l1));
  }
  double gamma_, kappa_, delta_;
  double log_c_ = 0.0;
};

double param_or_throw(const std::vector<Param>& ps, std::string_view name, FamilyId id) {
  for (const auto& [k, val] : ps) {
    if (k == name) return val;
  }
  throw ParseError(std::string(family_name(id)) + ": missing parameter '" + std::string(name) + "'");
}

std::vector<std::string_view> expected_params(FamilyId id) {
  switch (id) {
    case FamilyId::Smith: return {"lambda"};
    case FamilyId::Schlather: return {"rho"};
    case FamilyId::ExtremalT: return {"nu", "rho"};
    case FamilyId::MixedLogistic: return {"theta"};
    case FamilyId::AsymmetricLogistic: return {"theta", "phi", "alpha"};
    case FamilyId::AsymmetricMixed: return {"theta", "phi"};
    case FamilyId::MarshallOlkin: return {"alpha"};
    case FamilyId::Logistic: return {"alpha"};
    case FamilyId::GammaVarying: return {"gamma", "kappa", "delta"};
    case FamilyId::Custom: return {};
  }
  return {};
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  out.erase(std::remove(out.begin(), out.end(), '_'), out.end());
  out.erase(std::remove(out.begin(), out.end(), '-'), out.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double detail::ExponentModel::log_density(double w) const {
  const double d = density(w);
  return d > 0.0 ? std::log(d) : -kInf;
}

std::string_view family_name(FamilyId id) {
  switch (id) {
    case FamilyId::Smith: return "smith";
    case FamilyId::Schlather: return "schlather";
    case FamilyId::ExtremalT: return "extremalt";
    case FamilyId::MixedLogistic: return "mixedlogistic";
    case FamilyId::AsymmetricLogistic: return "asymmetriclogistic";
    case FamilyId::AsymmetricMixed: return "asymmetricmixed";
    case FamilyId::MarshallOlkin: return "marshallolkin";
    case FamilyId::Logistic: return "logistic";
    case FamilyId::GammaVarying: return "gammavarying";
    case FamilyId::Custom: return "custom";
  }
  return "unknown";
}

FamilyId family_from_name(std::string_view name) {
  const std::string n = lower(name);
  if (n == "smith" || n == "huslerreiss") return FamilyId::Smith;
  if (n == "schlather") return FamilyId::Schlather;
  if (n == "extremalt") return FamilyId::ExtremalT;
  if (n == "mixedlogistic" || n == "mixed") return FamilyId::MixedLogistic;
  if (n == "asymmetriclogistic") return FamilyId::AsymmetricLogistic;
  if (n == "asymmetricmixed") return FamilyId::AsymmetricMixed;
  if (n == "marshallolkin") return FamilyId::MarshallOlkin;
  if (n == "logistic") return FamilyId::Logistic;
  if (n == "gammavarying") return FamilyId::GammaVarying;
  throw ParseError("unknown family '" + std::string(name) + "'");
}

ExponentFamily::ExponentFamily(std::shared_ptr<const detail::ExponentModel> m)
    : model_(std::move(m)) {}

ExponentFamily ExponentFamily::smith(double lambda) {
  return ExponentFamily(std::make_shared<SmithModel>(lambda));
}
ExponentFamily ExponentFamily::schlather(double rho) {
  return ExponentFamily(std::make_shared<SchlatherModel>(rho));
}
ExponentFamily ExponentFamily::extremal_t(double nu, double rho) {
  return ExponentFamily(std::make_shared<ExtremalTModel>(nu, rho));
}
ExponentFamily ExponentFamily::mixed_logistic(double theta) {
  return ExponentFamily(std::make_shared<MixedLogisticModel>(theta));
}
ExponentFamily ExponentFamily::asymmetric_logistic(double theta, double phi, double alpha) {
  return ExponentFamily(std::make_shared<AsymmetricLogisticModel>(theta, phi, alpha));
}
ExponentFamily ExponentFamily::asymmetric_mixed(double theta, double phi) {
  return ExponentFamily(std::make_shared<AsymmetricMixedModel>(theta, phi));
}
ExponentFamily ExponentFamily::marshall_olkin(double alpha) {
  return ExponentFamily(std::make_shared<MarshallOlkinModel>(alpha));
}
ExponentFamily ExponentFamily::logistic(double alpha) {
  return ExponentFamily(std::make_shared<LogisticModel>(alpha));
}
ExponentFamily ExponentFamily::gamma_varying(double gamma, double kappa, double delta) {
  return ExponentFamily(std::make_shared<GammaVaryingModel>(gamma, kappa, delta));
}
ExponentFamily ExponentFamily::from_density(std::function<double(double)> density,
                                            SpectralSupport support, EndpointAtoms atoms,
                                            std::string label) {
  if (!density) throw DomainError("from_density: empty density");
  return ExponentFamily(
      std::make_shared<CustomDensityModel>(std::move(density), support, atoms, std::move(label)));
}

ExponentFamily ExponentFamily::make(FamilyId id, const std::vector<Param>& ps) {
  const auto names = expected_params(id);
  for (const auto& [k, val] : ps) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw ParseError(std::string(family_name(id)) + ": unknown parameter '" + k + "'");
    }
  }
  auto p = [&](std::string_view n) { return param_or_throw(ps, n, id); };
  switch (id) {
    case FamilyId::Smith: return smith(p("lambda"));
    case FamilyId::Schlather: return schlather(p("rho"));
    case FamilyId::ExtremalT: return extremal_t(p("nu"), p("rho"));
    case FamilyId::MixedLogistic: return mixed_logistic(p("theta"));
    case FamilyId::AsymmetricLogistic:
      return asymmetric_logistic(p("theta"), p("phi"), p("alpha"));
    case FamilyId::AsymmetricMixed: return asymmetric_mixed(p("theta"), p("phi"));
    case FamilyId::MarshallOlkin: return marshall_olkin(p("alpha"));
    case FamilyId::Logistic: return logistic(p("alpha"));
    case FamilyId::GammaVarying: return gamma_varying(p("gamma"), p("kappa"), p("delta"));
    case FamilyId::Custom: break;
  }
  throw ParseError("custom families cannot be built from parameters");
}

FamilyId ExponentFamily::id() const { return model_->id(); }
const std::vector<Param>& ExponentFamily::params() const { return model_->params; }
double ExponentFamily::param(std::string_view name) const {
  for (const auto& [k, val] : model_->params) {
    if (k == name) return val;
  }
  throw DomainError(model_->label + ": no parameter named '" + std::string(name) + "'");
}
std::string ExponentFamily::label() const { return model_->label; }
SpectralSupport ExponentFamily::support() const { return model_->support(); }
EndpointAtoms ExponentFamily::endpoint_atoms() const { return model_->atoms(); }
std::vector<InteriorAtom> ExponentFamily::interior_atoms() const {
  return model_->interior_atoms();
}

double v(const ExponentFamily& fam, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw DomainError("v: arguments must be positive");
  if (std::isinf(x) && std::isinf(y)) return 0.0;
  return fam.model().v(x, y);
}

double v1(const ExponentFamily& fam, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw DomainError("v1: arguments must be positive");
  return fam.model().v1(x, y);
}

double spectral_density(const ExponentFamily& fam, double w) {
  const auto s = fam.support();
  if (!(w > s.lower && w < s.upper)) return 0.0;
  return fam.model().density(w);
}

double log_spectral_density(const ExponentFamily& fam, double w) {
  const auto s = fam.support();
  if (!(w > s.lower && w < s.upper)) return -kInf;
  return fam.model().log_density(w);
}

EndpointAtoms atom_masses(const ExponentFamily& fam) { return fam.model().atoms(); }

double eta(const ExponentFamily& fam) { return 1.0 / v(fam, 1.0, 1.0); }

double gamma_varying_tail_constant(const ExponentFamily& fam) {
  if (fam.id() != FamilyId::GammaVarying)
    throw DomainError("gamma_varying_tail_constant: not a gammavarying family");
  return static_cast<const GammaVaryingModel&>(fam.model()).tail_constant();
}

ValidationReport validate(const ExponentFamily& fam, const QuadratureSpec& spec,
                          double tolerance) {
  ValidationReport r;
  const auto sup = fam.support();
  const auto atoms = fam.endpoint_atoms();
  double mass = 0.0, moment = 0.0;
  if (sup.upper > sup.lower) {
    const auto& m = fam.model();
    // Each half on a logistic scale, w - w_l = width / (1 + e^s) with s >= 0
    // (mirrored for the upper half), so integrable end-point singularities
    // become exponentially decaying tails.
    const double width = sup.upper - sup.lower;
    constexpr double kSMax = 700.0;
    for (int side = 0; side < 2; ++side) {
      const bool reflect = side == 1 && sup.upper == 1.0;
      // (w, h(w) dw/ds)
      const auto term = [&](double s) {
        const double g = 1.0 / (1.0 + std::exp(s));
        const double gap = width * g;  // distance from the end point
        const double jac = gap * (1.0 - g);
        const double w = side == 0 ? sup.lower + gap : sup.upper - gap;
        if (jac == 0.0) return std::pair{w, 0.0};
        return std::pair{w, jac * (reflect ? m.density_reflected(gap) : m.density(w))};
      };
      mass += integrate([&](double s) { return term(s).second; }, 0.0, kSMax, spec).value;
      moment += integrate([&](double s) {
                  const auto [w, hj] = term(s);
                  return w * hj;
                }, 0.0, kSMax, spec).value;
    }
  }
  mass += atoms.lower + atoms.upper;
  moment += sup.lower * atoms.lower + sup.upper * atoms.upper;
  if (sup.upper == sup.lower) {
    // Both "end points" coincide; the atoms above describe the same point.
    mass = atoms.lower + atoms.upper;
    moment = sup.lower * mass;
  }
  for (const auto& a : fam.interior_atoms()) {
    mass += a.mass;
    moment += a.w * a.mass;
  }
  r.total_mass = mass;
  r.moment = moment;
  r.mass_violation = std::fabs(mass - 2.0);
  r.moment_violation = std::fabs(moment - 1.0);
  r.max_violation = std::max(r.mass_violation, r.moment_violation);
  r.pass = r.max_violation <= tolerance;
  if (sup.lower == 0.5 && sup.upper == 0.5) {
    r.degenerate = true;
    r.note = "degenerate: w_l = w_u = 1/2 (perfect dependence), excluded by the end-point limit theory";
  }
  return r;
}

// ---------------------------------------------------------------------------

ExponentFamily parse_family(std::string_view spec) {
  std::string text(spec);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::string tok;
  std::string family;
  std::vector<Param> ps;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
      throw ParseError("family descriptor: expected key=value, got '" + tok + "'");
    }
    const std::string key = lower(tok.substr(0, eq));
    const std::string val = tok.substr(eq + 1);
    if (key == "family") {
      family = val;
      continue;
    }
    std::size_t used = 0;
    double num;
    try {
      num = std::stod(val, &used);
    } catch (const std::exception&) {
      throw ParseError("family descriptor: '" + key + "' is not a number: '" + val + "'");
    }
    if (used != val.size()) {
      throw ParseError("family descriptor: '" + key + "' is not a number: '" + val + "'");
    }
    for (const auto& p : ps) {
      if (p.first == key) throw ParseError("family descriptor: duplicate parameter '" + key + "'");
    }
    ps.emplace_back(key, num);
  }
  if (family.empty()) throw ParseError("family descriptor: missing family=<name>");
  return ExponentFamily::make(family_from_name(family), ps);
}

std::string to_spec_string(const ExponentFamily& fam) {
  std::string out = "family=" + std::string(family_name(fam.id()));
  for (const auto& [k, val] : fam.params()) out += " " + k + "=" + fmt(val);
  return out;
}

std::string to_json(const ExponentFamily& fam) {
  nlohmann::ordered_json j;
  j["family_id"] = std::string(family_name(fam.id()));
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, val] : fam.params()) p[k] = val;
  j["params"] = p;
  return j.dump();
}

ExponentFamily family_from_json(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("family json: ") + e.what());
  }
  if (!j.contains("family_id") || !j["family_id"].is_string())
    throw ParseError("family json: missing string field 'family_id'");
  std::vector<Param> ps;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ParseError("family json: 'params' must be an object");
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
      if (!it.value().is_number())
        throw ParseError("family json: parameter '" + it.key() + "' is not a number");
      ps.emplace_back(it.key(), it.value().get<double>());
    }
  }
  return ExponentFamily::make(family_from_name(j["family_id"].get<std::string>()), ps);
}

double gaussian_gaussian_atom(double correlation) {
  if (!(correlation >= -1.0 && correlation <= 1.0))
    throw DomainError("gaussian_gaussian_atom: correlation must lie in [-1, 1]");
  return 0.5 * (1.0 - correlation);
}

}  // namespace invms
