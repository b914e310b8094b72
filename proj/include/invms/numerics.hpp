#pragma once

// Shared numerical kernel: special functions, adaptive quadrature,
// bracketed root finding, Nelder-Mead and counter-based random streams.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace invms {

using RealFn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Special functions

double std_normal_pdf(double x);
/// Phi(x). Saturates to 0/1 in the far tails.
double std_normal_cdf(double x);
/// 1 - Phi(x) without cancellation.
double std_normal_sf(double x);
/// log Phi(x), accurate far into the lower tail.
double log_std_normal_cdf(double x);
/// Inverse of Phi on (0,1) (Wichura AS241).
double std_normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double student_t_pdf(double x, double dof);
double student_t_cdf(double x, double dof);
double student_t_quantile(double p, double dof);

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;

  /// Throws DomainError unless abs_tol > 0, rel_tol >= 0, max_subdivisions >= 1.
  void check() const;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod on [lo, hi]. The rule never
/// samples the endpoints, so integrable endpoint singularities are handled
/// by repeated bisection toward them. Throws ConvergenceError (carrying the
/// best estimate) when max_subdivisions is exhausted.
QuadratureResult integrate(const RealFn& f, double lo, double hi,
                           const QuadratureSpec& spec = {});

/// Integral over [lo, +inf) via x = lo + t / (1 - t).
QuadratureResult integrate_to_infinity(const RealFn& f, double lo,
                                       const QuadratureSpec& spec = {});

/// Single fixed 21-point Kronrod pass; no error control.
double gauss_kronrod21(const RealFn& f, double lo, double hi);

// ---------------------------------------------------------------------------
// Root finding

/// Brent's method. Requires f(lo) * f(hi) <= 0, otherwise BracketError.
/// Returns x with the sign change bracketed to width <= tol.
double find_root(const RealFn& f, double lo, double hi, double tol = 1e-12,
                 int max_iter = 300);

// ---------------------------------------------------------------------------
// Derivative-free minimization

struct MinimizeResult {
  std::vector<double> point;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  int evaluations = 0;
};

struct MinimizeOptions {
  int max_iter = 5000;
  double f_tol = 1e-12;  // relative spread of simplex values
  double x_tol = 1e-10;  // simplex diameter
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex from `init` with initial step `scale`, followed by one
/// restart from the best point with a fresh simplex. Non-finite objective
/// values are treated as +inf. Exhausting max_iter returns the best point
/// with converged == false.
MinimizeResult minimize(const ObjectiveFn& obj, std::span<const double> init,
                        std::span<const double> scale,
                        const MinimizeOptions& opts = {});

// ---------------------------------------------------------------------------
// Random streams

/// Counter-based generator: the k-th output is a splitmix64 finalization of
/// key + k * golden, where key = mix(seed, stream_index). Streams with equal
/// (seed, stream_index) are bitwise identical.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return index_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double exponential() noexcept;

  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace invms
