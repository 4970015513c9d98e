#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pdm/jet.hpp"
#include "pdm/params.hpp"

namespace pdm {

enum class EndpointKind { regular, singular_wall, decay_at_infinity };
enum class GridStrategy { mapped, truncated };
enum class SusyStatus { unbroken, broken, regime_dependent };
/// Classification of a particular ParamSet.
enum class Regime { unbroken, broken, unclassified };
/// Which partner: V- = W^2 - fW' (H- = A+A-) or V+ = W^2 + fW' (H+ = A-A+).
enum class Partner { minus, plus };

std::string_view to_string(EndpointKind k);
std::string_view to_string(GridStrategy s);
std::string_view to_string(SusyStatus s);
std::string_view to_string(Regime r);

struct DomainSpec {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  EndpointKind lower_kind = EndpointKind::decay_at_infinity;
  EndpointKind upper_kind = EndpointKind::decay_at_infinity;
  GridStrategy grid_strategy = GridStrategy::mapped;

  bool contains(double x) const { return x > lower && x < upper; }
  bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
  /// Point used as the origin for quadratures and outward searches.
  double reference_point() const;
};

struct FamilyValues {
  double W, Wx, f, fx, fxx;
};

/// A shape-invariant (W, f) pair with its parameter step and remainder.
///
/// W and f are available both on doubles and on jets; hand-coded first and
/// second derivatives come from values().
class PotentialFamily {
 public:
  virtual ~PotentialFamily() = default;

  virtual std::string_view id() const = 0;
  virtual std::string_view description() const = 0;
  /// Parameter names this family reads, e.g. {"lambda", "alpha"}.
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual DomainSpec domain() const = 0;
  virtual SusyStatus susy_status() const = 0;

  /// Empty when p is valid, otherwise the violated constraint.
  virtual std::optional<std::string> validity_violation(const ParamSet& p) const = 0;
  bool is_valid(const ParamSet& p) const { return !validity_violation(p).has_value(); }
  /// Throws InvalidParams naming the violated constraint.
  void require_valid(const ParamSet& p) const;

  virtual double W(double x, const ParamSet& p) const = 0;
  virtual Jetd W(const Jetd& x, const ParamSet& p) const = 0;
  virtual double f(double x, const ParamSet& p) const = 0;
  virtual Jetd f(const Jetd& x, const ParamSet& p) const = 0;
  virtual FamilyValues values(double x, const ParamSet& p) const = 0;

  /// One shape-invariance step p -> p'.
  virtual ParamSet step(const ParamSet& p) const = 0;
  /// Remainder R evaluated at p.
  virtual double remainder(const ParamSet& p) const = 0;
  virtual std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const;

  virtual Regime regime(const ParamSet& p) const = 0;
  /// Empty when the grid eigensolver is expected to be faithful for p.
  virtual std::optional<std::string> numerics_unsupported(const ParamSet& p) const = 0;

  /// Mapped coordinate u(x), an antiderivative of 1/f, and its inverse.
  virtual double to_mapped(double x, const ParamSet& p) const = 0;
  virtual double from_mapped(double u, const ParamSet& p) const = 0;

  /// log of the unnormalized state annihilated by A-, f^{-1/2} exp(-int W/f).
  virtual double log_ground_state(double x, const ParamSet& p) const;
  virtual Jetd ground_state(const Jetd& x, const ParamSet& p) const;
  virtual bool has_closed_form_ground_state() const { return false; }

  /// An antiderivative of W/f; adaptive Simpson from reference_point() unless
  /// the family has a closed form.
  virtual double superpotential_integral(double x, const ParamSet& p) const;

  /// Random valid draw in the unbroken regime.
  virtual ParamSet sample(std::mt19937_64& rng) const = 0;
};

/// integral of W/f from reference_point() to x by adaptive Simpson (tol 1e-12).
double quadrature_superpotential_integral(const PotentialFamily& fam, const ParamSet& p, double x);

using FamilyPtr = std::shared_ptr<const PotentialFamily>;

/// The fixed catalog: ex1, ex2, t1r1, t1r2, t1r3, t1r4, gen2.
const std::vector<FamilyPtr>& catalog();
/// Throws std::invalid_argument for an unknown id.
FamilyPtr find_family(std::string_view id);

// Elementary constructions.

FamilyValues evaluate_family(const PotentialFamily& fam, const ParamSet& p, double x);

struct PartnerPair {
  double Vminus, Vplus;
};
PartnerPair partner_potentials(const PotentialFamily& fam, const ParamSet& p, double x);
double partner_potential(const PotentialFamily& fam, const ParamSet& p, Partner which, double x);

struct EffectivePotential {
  double Veff, M;
};
EffectivePotential effective_potential(const PotentialFamily& fam, const ParamSet& p, Partner which, double x);

struct SteppedParams {
  ParamSet params;
  bool left_validity = false;  ///< the stepped set fails the validity predicate
};
SteppedParams step_params(const PotentialFamily& fam, const ParamSet& p);

double R_of(const PotentialFamily& fam, const ParamSet& p);

/// gen2 mu-recurrence as printed with the n^2 factor, for comparison with
/// the coefficient-matching step.
double gen2_printed_mu_step(const ParamSet& p, int n);

}  // namespace pdm
