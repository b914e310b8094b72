#pragma once

// Catalog of bivariate exponent measures V(x, y) in unit Frechet margins,
// with partial derivative V_1 = dV/dx, spectral density h and the masses the
// spectral measure H places at its end points.

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invms/numerics.hpp"

namespace invms {

enum class FamilyId {
  Smith,               // Husler-Reiss pairwise law, lambda > 0
  Schlather,           // extremal Gaussian, rho in (-1, 1)
  ExtremalT,           // nu > 0, rho in (-1, 1)
  MixedLogistic,       // theta in (0, 1)
  AsymmetricLogistic,  // theta, phi in [0, 1], alpha in (0, 1]
  AsymmetricMixed,     // theta, theta + 3 phi > 0; theta + phi, theta + 2 phi <= 1
  MarshallOlkin,       // alpha in [0, 1]
  Logistic,            // alpha in (0, 1]
  GammaVarying,        // gamma > 0, kappa > 0, delta real
  Custom,              // user-supplied spectral density
};

std::string_view family_name(FamilyId id);
FamilyId family_from_name(std::string_view name);  // throws ParseError

/// Masses H({w_lower}) and H({w_upper}).
struct EndpointAtoms {
  double lower = 0.0;
  double upper = 0.0;
};

/// Closed support [w_lower, w_upper] of H.
struct SpectralSupport {
  double lower = 0.0;
  double upper = 1.0;
};

/// Point mass strictly inside the support (only Marshall-Olkin has one).
struct InteriorAtom {
  double w;
  double mass;
};

using Param = std::pair<std::string, double>;

namespace detail {
class ExponentModel;
}

/// Immutable value type; copies share the underlying model.
class ExponentFamily {
 public:
  static ExponentFamily smith(double lambda);
  static ExponentFamily schlather(double rho);
  static ExponentFamily extremal_t(double nu, double rho);
  static ExponentFamily mixed_logistic(double theta);
  static ExponentFamily asymmetric_logistic(double theta, double phi, double alpha);
  static ExponentFamily asymmetric_mixed(double theta, double phi);
  static ExponentFamily marshall_olkin(double alpha);
  static ExponentFamily logistic(double alpha);
  /// Symmetric density c (w(1-w))^delta exp{-kappa (w^-gamma + (1-w)^-gamma)},
  /// c fixed by total mass 2. As w -> 0 it behaves like c w^delta exp(-kappa w^-gamma).
  static ExponentFamily gamma_varying(double gamma, double kappa, double delta);
  /// Spectral measure given by a density on (support.lower, support.upper)
  /// plus end-point atoms. No normalization is applied; validate() reports
  /// the constraint violations.
  static ExponentFamily from_density(std::function<double(double)> density,
                                     SpectralSupport support, EndpointAtoms atoms,
                                     std::string label = "custom");

  /// Build from a catalog id and named parameters (order-insensitive).
  static ExponentFamily make(FamilyId id, const std::vector<Param>& params);

  FamilyId id() const;
  const std::vector<Param>& params() const;
  /// Throws DomainError when the family has no such parameter.
  double param(std::string_view name) const;
  std::string label() const;

  SpectralSupport support() const;
  EndpointAtoms endpoint_atoms() const;
  std::vector<InteriorAtom> interior_atoms() const;

  const detail::ExponentModel& model() const { return *model_; }

 private:
  explicit ExponentFamily(std::shared_ptr<const detail::ExponentModel> m);
  std::shared_ptr<const detail::ExponentModel> model_;
};

/// V(x, y). Domain error unless x, y > 0; infinite arguments allowed.
double v(const ExponentFamily& fam, double x, double y);

/// dV/dx at (x, y). BoundaryError on an interior spectral-atom ray.
double v1(const ExponentFamily& fam, double x, double y);

/// h(w); zero outside the open support.
double spectral_density(const ExponentFamily& fam, double w);

/// log h(w); -inf outside the support. Stays finite where h underflows.
double log_spectral_density(const ExponentFamily& fam, double w);

EndpointAtoms atom_masses(const ExponentFamily& fam);

/// Coefficient of tail dependence, 1 / V(1, 1).
double eta(const ExponentFamily& fam);

struct ValidationReport {
  double total_mass = 0.0;
  double moment = 0.0;
  double mass_violation = 0.0;
  double moment_violation = 0.0;
  double max_violation = 0.0;
  bool pass = false;        // both constraints within tolerance
  bool degenerate = false;  // w_lower == w_upper == 1/2
  std::string note;
};

/// Numerically integrates h (plus atoms) and checks total mass 2 and the
/// moment constraint to within `tolerance`.
ValidationReport validate(const ExponentFamily& fam, const QuadratureSpec& spec = {},
                          double tolerance = 1e-6);

/// Parses `family=smith lambda=1.3` (whitespace or comma separated).
ExponentFamily parse_family(std::string_view spec);
/// Canonical textual form accepted by parse_family.
std::string to_spec_string(const ExponentFamily& fam);
/// {"family_id": "...", "params": {...}}
std::string to_json(const ExponentFamily& fam);
ExponentFamily family_from_json(std::string_view json);

/// Normalizing constant c of a gammavarying density, so that
/// h(w) ~ c w^delta exp(-kappa w^-gamma) as w -> 0. DomainError otherwise.
double gamma_varying_tail_constant(const ExponentFamily& fam);

/// The Gaussian-Gaussian process H({0}) = (1 - rho(h)) / 2 for a correlation
/// value rho(h) in [-1, 1].
double gaussian_gaussian_atom(double correlation);

namespace detail {

class ExponentModel {
 public:
  virtual ~ExponentModel() = default;
  virtual FamilyId id() const = 0;
  virtual double v(double x, double y) const = 0;
  virtual double v1(double x, double y) const = 0;
  virtual double density(double w) const = 0;
  virtual double log_density(double w) const;
  /// h(1 - y), accurate for y far below machine epsilon.
  virtual double density_reflected(double y) const {
    return symmetric() ? density(y) : density(1.0 - y);
  }
  /// h(w) = h(1 - w).
  virtual bool symmetric() const { return false; }
  virtual EndpointAtoms atoms() const = 0;
  virtual SpectralSupport support() const { return {}; }
  virtual std::vector<InteriorAtom> interior_atoms() const { return {}; }

  std::vector<Param> params;
  std::string label;
};

}  // namespace detail

}  // namespace invms
