#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "pdm/family.hpp"
#include "pdm/grid.hpp"

namespace pdm {

enum class Truncation { none, remainder_nonpositive, validity_exit, normalizability_fail };
std::string_view to_string(Truncation t);

struct SpectrumLevel {
  int n = 0;
  double E_algebraic = 0.0;
  std::optional<double> E_closed_form;
  std::optional<double> E_numeric;  ///< extrapolated
  std::optional<double> E_coarse, E_fine;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = true;
};

struct SpectrumReport {
  std::string family_id;
  ParamSet params;
  std::vector<SpectrumLevel> levels;
  Truncation truncation = Truncation::none;
  std::optional<int> truncated_at;
  // Grid and extrapolation metadata (numerical side only).
  std::optional<Coordinate> coordinate;
  int N_coarse = 0, N_fine = 0;
  double h_coarse = 0.0, h_fine = 0.0;
  double lower = 0.0, upper = 0.0;
  std::string extrapolation;
  double rel_tol = 0.0, abs_tol = 0.0;
  bool pass = true;
};

/// E_n = sum of R over the first n elements of the step chain.  Stops early
/// when stepping leaves the validity region or the next increment is not
/// positive.  Throws RegimeError outside the unbroken regime.
SpectrumReport algebraic_spectrum(const PotentialFamily& fam, const ParamSet& p, int n_max);

/// Empty when the annihilated state is square integrable, judged from the
/// local power-law exponent of log psi0 at each domain end.
std::optional<std::string> normalizability_violation(const PotentialFamily& fam, const ParamSet& p);

/// f^{-1/2} exp(-int W/f) on the grid, unit dx-norm.  Throws RegimeError in
/// the broken regime or when the state is not normalizable.
GridFunction ground_state(const PotentialFamily& fam, const ParamSet& p, GridPtr grid);

struct ExcitedState {
  GridFunction psi;       ///< unit dx-norm
  double energy = 0.0;    ///< algebraic E_n
  double expectation = 0.0;  ///< <psi, H- psi>
  double residual = 0.0;     ///< ||(H- - E_n) psi|| / ||psi||
  int nodes = 0;
  double tail_growth = 0.0;  ///< see tail_growth()
};
/// psi_n = A+(p) A+(step p) ... A+(step^{n-1} p) psi0(step^n p) with exact
/// derivatives.  Throws std::invalid_argument when n lies beyond the
/// algebraic truncation point.
ExcitedState excited_state(const PotentialFamily& fam, const ParamSet& p, int n, GridPtr grid);

/// Lowest m eigenvalues by Sturm bisection; requires 1 <= m <= N/4.
Eigen::VectorXd numerical_spectrum(const TridiagonalOperator& op, int m);
/// Lowest m eigenvectors as unit dx-norm grid functions (phi on mapped grids).
std::vector<GridFunction> numerical_states(const TridiagonalOperator& op, int m);

/// Two-grid h^2 extrapolation with the exact spacing ratio.
double richardson(double h1, double E1, double h2, double E2);

struct CompareOptions {
  int N = 2000;  ///< coarse grid; the fine grid has 2N nodes
  std::optional<GridStrategy> strategy;
  double rel_tol = 1e-4;
  double abs_tol = 1e-6;  ///< used where E_algebraic = 0
};

/// Algebraic levels against the grid eigensolver on N and 2N nodes plus
/// Richardson extrapolation.  Throws std::invalid_argument when the family
/// reports the parameters as outside its supported numerics.
SpectrumReport compare_spectra(const PotentialFamily& fam, const ParamSet& p, int n_max,
                               const CompareOptions& options = {});

/// Observed convergence order log2((E_N - E_2N) / (E_2N - E_4N)) of each of
/// the lowest m levels.
Eigen::VectorXd convergence_order(const PotentialFamily& fam, const ParamSet& p, int m, int N,
                                  std::optional<GridStrategy> strategy = std::nullopt);

}  // namespace pdm
