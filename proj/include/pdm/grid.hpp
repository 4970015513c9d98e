#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "pdm/family.hpp"
#include "pdm/operators.hpp"

namespace pdm {

enum class Coordinate { direct_x, mapped_u };

/// Uniform grid of N interior nodes in the working coordinate (x, or
/// u = integral of dx/f), with Dirichlet ends at `lower` and `upper`.
struct Grid {
  Coordinate coordinate = Coordinate::direct_x;
  double lower = 0.0;
  double upper = 0.0;
  double spacing = 0.0;
  Eigen::VectorXd nodes;  ///< working coordinate
  Eigen::VectorXd x;      ///< physical position of each node
  std::string family_id;
  ParamSet params;

  Eigen::Index size() const { return nodes.size(); }
  bool mapped() const { return coordinate == Coordinate::mapped_u; }
};
using GridPtr = std::shared_ptr<const Grid>;

struct GridOptions {
  std::optional<GridStrategy> strategy;
  /// Explicit x-interval for a direct grid; the ends become Dirichlet walls.
  std::optional<std::pair<double, double>> bounds;
};

struct TruncationBounds {
  double lower, upper;
};

/// x-interval on which the closed-form ground state stays above
/// `relative` * its maximum; finite domain ends are kept as they are.
/// Throws NumericalBreakdown when no bound exists within 1e6 length units.
TruncationBounds truncation_bounds(const PotentialFamily& fam, const ParamSet& p, double relative = 1e-12);

/// Throws std::invalid_argument for N < 16.
GridPtr build_grid(const PotentialFamily& fam, const ParamSet& p, int N, const GridOptions& options = {});

/// Values on a grid.  On a mapped grid the stored function is
/// phi = f^{1/2} psi, so the plain trapezoid norm in the working coordinate is
/// the dx-norm of psi in both cases.
struct GridFunction {
  GridPtr grid;
  Eigen::VectorXd values;

  double dot(const GridFunction& other) const { return grid->spacing * values.dot(other.values); }
  double norm() const { return std::sqrt(dot(*this)); }
  GridFunction& normalize();
  /// psi at the nodes, undoing the f^{1/2} factor on mapped grids.
  Eigen::VectorXd physical(const PotentialFamily& fam) const;
  /// Sign changes, ignoring entries below `floor` * max|value|.
  int node_count(double floor = 1e-8) const;
};

/// max |v| over the outermost 5% of the nodes divided by max |v| over the
/// adjacent 5-15% band, the larger of the two ends.  Above 1 the vector grows
/// toward an end of the window, which is how a chain-built state that is not
/// square integrable shows up; nothing guarantees B+^n psi0 is.
double tail_growth(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Samples a closed-form state on the grid (converted to phi on mapped grids).
/// `order` is the jet order fed to psi, i.e. how many derivatives its ladder
/// or Hamiltonian applications consume.
GridFunction sample(const PotentialFamily& fam, const StateFn& psi, GridPtr grid, int order = 0);

struct TridiagonalOperator {
  Eigen::VectorXd diag;
  Eigen::VectorXd offdiag;
  GridPtr grid;
  Partner which = Partner::minus;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

/// Direct grids: flux form with g = f^2 at midpoints plus V_eff.  Mapped grids:
/// constant-mass form -d^2/du^2 + V(x(u)).  Dirichlet at both ends.
TridiagonalOperator discretize_hamiltonian(const PotentialFamily& fam, const ParamSet& p, Partner which, GridPtr grid);

/// 4th-order central first derivative, one-sided 4th order at the ends.
Eigen::VectorXd fd_first_derivative(const Eigen::VectorXd& v, double h);
/// 4th-order central second derivative, one-sided 4th order at the ends.
Eigen::VectorXd fd_second_derivative(const Eigen::VectorXd& v, double h);

/// A-/A+ on a direct-x grid function with finite-difference psi'.
GridFunction apply_ladder(const PotentialFamily& fam, const ParamSet& p, Ladder sign, const GridFunction& psi);
/// A-/A+ applied to a closed-form state using its exact derivative.
GridFunction apply_ladder(const PotentialFamily& fam, const ParamSet& p, Ladder sign, const StateFn& psi, GridPtr grid);

/// Expanded PDM Hamiltonian with 4th-order finite differences (direct grids).
GridFunction apply_hamiltonian_fd(const PotentialFamily& fam, const ParamSet& p, Partner which,
                                  const GridFunction& psi);

struct SelfCheckOptions {
  int trials = 6;
  std::uint64_t seed = 0;
  /// Bumps stay this fraction of the grid length away from its ends.
  double margin = 0.05;
};

struct SelfCheckReport {
  double adjoint_defect;
  double factorization_defect;
};

/// Adjointness of A+/A- under the plain dx product, and A+A- against the
/// discretized H-, on random compactly supported bumps.  Direct grids only.
SelfCheckReport operator_selfcheck(const PotentialFamily& fam, const ParamSet& p, GridPtr grid,
                                   const SelfCheckOptions& options = {});

}  // namespace pdm
