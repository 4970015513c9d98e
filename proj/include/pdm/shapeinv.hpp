#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "pdm/family.hpp"

namespace pdm {

struct SIReport {
  bool is_shape_invariant = false;
  double R_estimate = 0.0;     ///< mean of the residual over the samples
  double max_deviation = 0.0;  ///< max |residual - mean|
  int samples_used = 0;
  double R_closed_form = 0.0;
  bool closed_form_agrees = false;
  double tolerance = 0.0;
};

/// n Chebyshev-Gauss points inside the family's sampling window: the domain
/// with 5% of its width trimmed at finite ends, reference point +-5 at
/// infinite ends.
Eigen::VectorXd chebyshev_samples(const PotentialFamily& fam, int n);

/// V+(x; p1) - V-(x; p2) at each x.
Eigen::VectorXd si_residual(const PotentialFamily& fam, const ParamSet& p1, const ParamSet& p2,
                            const Eigen::VectorXd& xs);

SIReport verify_shape_invariance(const PotentialFamily& fam, const ParamSet& p1, int n_samples = 257,
                                 double tol = 1e-9);

struct ParamMapResult {
  ParamSet p2;
  double deviation = 0.0;  ///< max |residual - mean| at p2
  double variance = 0.0;
  double R_estimate = 0.0;
  int iterations = 0;
  bool converged = false;  ///< variance < 1e-12
};

/// Simplex search for the parameters p2 that make si_residual(p1, p2) flat.
/// lambda is always searched; mu too when the family has one.  alpha and
/// beta are held at p1's values.
ParamMapResult discover_param_map(const PotentialFamily& fam, const ParamSet& p1, const ParamSet& guess,
                                  int n_samples = 257);

/// One row of the gen2 mu-step comparison: starting from the n-th chain
/// element, the fitted next mu against coefficient matching and the
/// recurrence carrying an n^2 factor.
struct Gen2StepRow {
  int n = 0;
  ParamSet from;
  ParamMapResult fitted;
  double mu_coefficient_matching = 0.0;
  double mu_printed = 0.0;
};
std::vector<Gen2StepRow> gen2_step_comparison(const ParamSet& p1, int steps = 2);

struct ReflectionReport {
  double constant_estimate = 0.0;
  double deviation = 0.0;  ///< max |residual - mean|
  double expected = 0.0;   ///< 4 lambda mu + 2 alpha lambda + 2 mu + alpha
  int samples_used = 0;
};

/// For t1r1 in the broken regime (lambda > 0, mu > -alpha):
/// V+(x; lambda, mu) - V-(x; -lambda, mu + alpha).  Throws RegimeError
/// outside that regime.
ReflectionReport reflection_check(const ParamSet& p, int n_samples = 257);

}  // namespace pdm
