#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pdm {

/// Named real parameters of a family instance.  `lambda` and `mu` belong to
/// the superpotential, `alpha` and `beta` to the deforming function.
struct ParamSet {
  double lambda = 0.0;
  std::optional<double> mu;
  double alpha = 0.0;
  std::optional<double> beta;

  double mu_or_zero() const { return mu.value_or(0.0); }
  double beta_or_zero() const { return beta.value_or(0.0); }

  bool all_finite() const;
  std::string to_string() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

/// A ParamSet outside the owning family's validity region.
class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside the (open) family domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameters valid for the family but in the wrong SUSY regime for the
/// requested operation (e.g. a ground state asked for in the broken regime).
class RegimeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value or failed to converge.
class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdm
