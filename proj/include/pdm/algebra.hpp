#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pdm/family.hpp"
#include "pdm/grid.hpp"

namespace pdm {

/// Parameters on the affine orbit params_k = base + k * eta, k = -K..K, where
/// eta is the increment of one shape-invariance step.
class ParamLattice {
 public:
  /// Throws std::invalid_argument when the family's step is not a fixed
  /// translation (gen2) or K < 1.
  ParamLattice(FamilyPtr family, const ParamSet& base, int K);

  const PotentialFamily& family() const { return *family_; }
  FamilyPtr family_ptr() const { return family_; }
  const ParamSet& base() const { return base_; }
  const ParamSet& eta() const { return eta_; }
  int K() const { return K_; }

  /// Parameters at any integer index (not limited to -K..K).
  ParamSet at(int k) const;
  bool valid(int k) const { return family_->is_valid(at(k)); }
  /// Indices in -K..K whose parameters fail the family's validity predicate.
  std::vector<int> invalid_indices() const;
  double R(int k) const;

 private:
  FamilyPtr family_;
  ParamSet base_, eta_;
  int K_;
};

/// Contiguous range of lattice indices on which a state is defined.
struct Window {
  int lo = 0, hi = -1;
  bool empty() const { return hi < lo; }
  int size() const { return hi - lo + 1; }
  bool contains(int k) const { return k >= lo && k <= hi; }
};
Window intersect(Window a, Window b);

/// Sampled lattice state psi(x_i, k) on a direct-x grid; column k + K holds
/// slice k.  Slices outside the window are zero and meaningless.
struct LatticeState {
  GridPtr grid;
  int K = 0;
  Window window;
  Eigen::MatrixXd values;

  Eigen::Index column(int k) const { return k + K; }
  auto slice(int k) { return values.col(column(k)); }
  auto slice(int k) const { return values.col(column(k)); }
};

/// Closed-form lattice state: psi(x, k) on jets, valid on `window`.
/// `depth` counts the derivatives its evaluation consumes.
struct LatticeExpr {
  std::function<Jetd(const Jetd& x, int k)> fn;
  Window window;
  int depth = 0;
};

enum class Shift { T, Tdag };

// Finite-difference path on sampled states.  Each shift shrinks the window by
// one; an exhausted window throws std::invalid_argument.

LatticeState apply_shift(const LatticeState& s, Shift dir);
LatticeState apply_B(const LatticeState& s, Ladder sign, const ParamLattice& lattice);
/// (R_m psi)(k) = R(params_{k+m}) psi(k).  Throws InvalidParams when some
/// params_{k+m} is invalid.
LatticeState apply_R(const LatticeState& s, int m, const ParamLattice& lattice);
LatticeState apply_Hminus(const LatticeState& s, const ParamLattice& lattice);
/// a + c b on the common window.
LatticeState combine(const LatticeState& a, double c, const LatticeState& b);
/// Relative defect ||a - b|| / max(||reference||, 1e-300) over the common window.
double relative_defect(const LatticeState& a, const LatticeState& b, const LatticeState& reference);

// Analytic path on closed-form states (exact derivatives through jets).

LatticeExpr apply_shift(const LatticeExpr& e, Shift dir);
LatticeExpr apply_B(const LatticeExpr& e, Ladder sign, const ParamLattice& lattice);
LatticeExpr apply_R(const LatticeExpr& e, int m, const ParamLattice& lattice);
LatticeExpr apply_Hminus(const LatticeExpr& e, const ParamLattice& lattice);
LatticeExpr combine(const LatticeExpr& a, double c, const LatticeExpr& b);
/// Samples e on the grid; `only` restricts which slices are computed.
LatticeState evaluate(const LatticeExpr& e, GridPtr grid, int K, std::optional<Window> only = std::nullopt);

/// Gaussian bump in x times a smooth profile in k, on the full window.
struct BumpState {
  double center, width, k_rate, k_phase;
  LatticeExpr expr(int K) const;
};
/// Random bumps centred within 10% of the grid interval's middle, widths
/// 3.2-4.8% of its length, so every bump is negligible (below e^-30) at the
/// grid ends.
std::vector<BumpState> random_bump_states(const Grid& grid, int count, std::uint64_t seed);

/// x-interval for lattice grids: finite domain ends are kept; an infinite end
/// is replaced by the point, at most 10 units from the reference point, where
/// f reaches 1000 times its reference value.
std::pair<double, double> default_lattice_bounds(const PotentialFamily& fam, const ParamSet& p);

/// psi(., k) = closed-form ground state at params_k.
LatticeExpr ground_state_lattice(const ParamLattice& lattice);

struct DefectPair {
  double analytic = 0.0;
  double fd = 0.0;
};

struct CommutatorReport {
  DefectPair bb;             ///< [B-, B+] = R_{-1}
  DefectPair factorization;  ///< B+ B- = H- slice-wise
  double scalar_k0 = 0.0;    ///< R(params_{-1}), the scalar acting at k = 0
};
CommutatorReport check_commutator_BB(const ParamLattice& lattice, GridPtr grid, const std::vector<BumpState>& states);

struct IntertwiningReport {
  int n = 0;
  double r_b_plus = 0.0;   ///< R_m B+ - B+ R_{m-1}, exact
  double r_b_minus = 0.0;  ///< R_m B- - B- R_{m+1}, exact
  DefectPair h_b_plus;     ///< [H-, B+^n] = (R_0 + ... + R_{n-1}) B+^n
  DefectPair h_b_minus;    ///< [H-, B-^n] = -B-^n (R_0 + ... + R_{n-1})
  double scalar_sum_k0 = 0.0;
};
/// Throws std::invalid_argument when the window 2K+1 is narrower than 2n+2.
IntertwiningReport check_intertwining(const ParamLattice& lattice, int n, GridPtr grid,
                                      const std::vector<BumpState>& states);

struct ExactIdentityReport {
  double shift_inverse = 0.0;      ///< T T^dag = T^dag T = 1
  double shift_conjugation = 0.0;  ///< T R_m T^dag = R_{m+1}
  double r_b_plus = 0.0;
  double r_b_minus = 0.0;
};
ExactIdentityReport check_exact_identities(const ParamLattice& lattice, GridPtr grid,
                                           const std::vector<BumpState>& states);

struct RCommutatorReport {
  double c_plus = 0.0;   ///< least-squares c in [B+, R_{-1}] = c B+
  double c_minus = 0.0;  ///< least-squares c in [B-, R_{-1}] = -c B-
  DefectPair plus_defect, minus_defect;
  /// [B+, [B+, R_{-1}]] relative to the size of B+ [B+, R_{-1}].
  double double_commutator = 0.0;
  double expected = 0.0;  ///< R(params_0) - R(params_{-1})
  std::optional<double> table_value;
};
RCommutatorReport check_R_commutators(const ParamLattice& lattice, GridPtr grid,
                                      const std::vector<BumpState>& states);

/// The [B-, B+] scalar at k = 0 written in terms of params_0, where the
/// catalog gives it explicitly (ex1: 2 lambda - alpha; ex2:
/// 2 (lambda - alpha mu) + alpha^2 - 1).
std::optional<double> commutator_scalar_closed_form(const PotentialFamily& fam, const ParamSet& p);

/// Coefficient printed in the family's commutator table entry
/// [B+-, R] = +-c B+-, where the catalog has one.
std::optional<double> tabulated_R_coefficient(const PotentialFamily& fam, const ParamSet& p);

struct LadderLevel {
  int n = 0;
  double expected = 0.0;   ///< R_0 + ... + R_{n-1} at k = 0
  double rayleigh = 0.0;   ///< <chi, H- chi> / <chi, chi>, chi = B+^n psi0 at k = 0
  double residual = 0.0;   ///< ||H- chi - expected chi|| / ||chi||
  double identity_defect = 0.0;  ///< ||H- chi - expected chi|| / ||H- chi|| (0 when both vanish)
  double tail_growth = 0.0;  ///< see tail_growth(); above 1 chi is not normalizable
};
struct LadderReport {
  double annihilation = 0.0;  ///< ||B- psi0|| / ||psi0|| over the window
  std::vector<LadderLevel> levels;
};
/// Throws RegimeError when params_0 is not in the unbroken regime.
LadderReport check_ladder_eigenstates(const ParamLattice& lattice, int n_max, GridPtr grid);

}  // namespace pdm
