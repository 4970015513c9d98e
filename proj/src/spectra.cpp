#include "pdm/spectra.hpp"

#include <cmath>
#include <stdexcept>

#include "pdm/operators.hpp"
#include "pdm/tridiagonal.hpp"

namespace pdm {

namespace {

void require_grid_for(const PotentialFamily& fam, const ParamSet& p, const Grid& grid) {
  if (grid.family_id != fam.id()) throw std::invalid_argument("grid was built for family " + grid.family_id);
  if (grid.params.alpha != p.alpha || grid.params.beta != p.beta)
    throw std::invalid_argument("grid was built for a different deforming function");
}

void require_unbroken(const PotentialFamily& fam, const ParamSet& p) {
  fam.require_valid(p);
  if (fam.regime(p) != Regime::unbroken)
    throw RegimeError(std::string(fam.id()) + ": parameters " + p.to_string() +
                      " are not in the unbroken regime; no normalizable annihilated state");
}

// Exponent a in psi ~ t^a as t -> 0 (walls) or psi ~ t^-a as t -> inf.
double local_exponent(const PotentialFamily& fam, const ParamSet& p, double x1, double x2, double ratio) {
  const double l1 = fam.log_ground_state(x1, p), l2 = fam.log_ground_state(x2, p);
  if (l2 == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  return (l1 - l2) / std::log(ratio);
}

}  // namespace

std::string_view to_string(Truncation t) {
  switch (t) {
    case Truncation::none: return "none";
    case Truncation::remainder_nonpositive: return "remainder-nonpositive";
    case Truncation::validity_exit: return "validity-exit";
    case Truncation::normalizability_fail: return "normalizability-fail";
  }
  return "?";
}

SpectrumReport algebraic_spectrum(const PotentialFamily& fam, const ParamSet& p, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  require_unbroken(fam, p);
  SpectrumReport rep;
  rep.family_id = std::string(fam.id());
  rep.params = p;
  SpectrumLevel ground;
  ground.E_closed_form = fam.spectrum_closed_form(0, p);
  rep.levels.push_back(ground);

  ParamSet q = p;
  double E = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      const SteppedParams next = step_params(fam, q);
      if (next.left_validity) {
        rep.truncation = Truncation::validity_exit;
        rep.truncated_at = n;
        break;
      }
      q = next.params;
    }
    const double r = fam.remainder(q);
    if (!(r > 0.0)) {
      rep.truncation = Truncation::remainder_nonpositive;
      rep.truncated_at = n;
      break;
    }
    E += r;
    SpectrumLevel lv;
    lv.n = n;
    lv.E_algebraic = E;
    lv.E_closed_form = fam.spectrum_closed_form(n, p);
    rep.levels.push_back(lv);
  }
  return rep;
}

std::optional<std::string> normalizability_violation(const PotentialFamily& fam, const ParamSet& p) {
  const DomainSpec d = fam.domain();
  const double ref = d.reference_point();
  auto check_end = [&](double end, int dir) -> std::optional<std::string> {
    if (!std::isfinite(end)) {
      const double a = local_exponent(fam, p, ref + dir * 1e3, ref + dir * 2e3, 2.0);
      // psi ~ x^-a with a <= 1/2 is not square integrable at infinity.
      if (!(a > 0.5)) return "ground state decays too slowly at infinity (|x|^-" + std::to_string(a) + ")";
    } else {
      const double scale = std::min(1.0, std::abs(ref - end));
      const double a = local_exponent(fam, p, end - dir * 1e-4 * scale, end - dir * 1e-5 * scale, 10.0);
      if (!(a > -0.5)) return "ground state diverges at the wall (distance^" + std::to_string(a) + ")";
    }
    return std::nullopt;
  };
  if (auto why = check_end(d.lower, -1)) return why;
  return check_end(d.upper, 1);
}

GridFunction ground_state(const PotentialFamily& fam, const ParamSet& p, GridPtr grid) {
  require_unbroken(fam, p);
  require_grid_for(fam, p, *grid);
  if (auto why = normalizability_violation(fam, p)) throw RegimeError(std::string(fam.id()) + ": " + *why);
  Eigen::VectorXd logs(grid->size());
  for (Eigen::Index i = 0; i < grid->size(); ++i) logs(i) = fam.log_ground_state(grid->x(i), p);
  const double peak = logs.maxCoeff();
  GridFunction out{grid, (logs.array() - peak).exp().matrix()};
  if (grid->mapped())
    for (Eigen::Index i = 0; i < grid->size(); ++i) out.values(i) *= std::sqrt(fam.f(grid->x(i), p));
  out.normalize();
  return out;
}

ExcitedState excited_state(const PotentialFamily& fam, const ParamSet& p, int n, GridPtr grid) {
  require_grid_for(fam, p, *grid);
  const SpectrumReport spec = algebraic_spectrum(fam, p, n);
  if (static_cast<int>(spec.levels.size()) <= n)
    throw std::invalid_argument("level " + std::to_string(n) + " lies beyond the algebraic truncation point (" +
                                std::string(to_string(spec.truncation)) + ")");

  std::vector<ParamSet> chain{p};
  for (int i = 0; i < n; ++i) chain.push_back(fam.step(chain.back()));
  if (auto why = normalizability_violation(fam, chain.back()))
    throw RegimeError(std::string(fam.id()) + ": innermost ground state of the chain: " + *why);
  // Scale the innermost ground state by its peak on the grid to keep values O(1).
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid->size(); ++i) peak = std::max(peak, fam.log_ground_state(grid->x(i), chain.back()));
  StateFn psi = [&fam, q = chain.back(), peak](const Jetd& x) { return fam.ground_state(x, q) * std::exp(-peak); };
  for (int i = n - 1; i >= 0; --i) psi = ladder(fam, chain[i], Ladder::plus, psi);

  ExcitedState out{sample(fam, psi, grid, n)};
  const double norm = out.psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalBreakdown("excited state has zero or non-finite norm");
  GridFunction hpsi = sample(fam, hamiltonian(fam, p, Partner::minus, psi), grid, n + 2);
  out.psi.values /= norm;
  hpsi.values /= norm;
  out.energy = spec.levels[n].E_algebraic;
  out.expectation = out.psi.dot(hpsi);
  GridFunction r{grid, hpsi.values - out.energy * out.psi.values};
  out.residual = r.norm();
  out.nodes = out.psi.node_count();
  out.tail_growth = tail_growth(out.psi.values);
  return out;
}

Eigen::VectorXd numerical_spectrum(const TridiagonalOperator& op, int m) {
  if (m < 1 || m > op.diag.size() / 4)
    throw std::invalid_argument("requested " + std::to_string(m) + " eigenvalues; need 1 <= m <= N/4 = " +
                                std::to_string(op.diag.size() / 4));
  return lowest_eigenvalues<double>(op.diag, op.offdiag, m);
}

std::vector<GridFunction> numerical_states(const TridiagonalOperator& op, int m) {
  numerical_spectrum(op, std::min<int>(m, 1));  // validates m >= 1 and grid size
  if (m > op.diag.size() / 4) throw std::invalid_argument("too many eigenvectors requested for the grid size");
  const auto eig = lowest_eigenpairs<double>(op.diag, op.offdiag, m);
  std::vector<GridFunction> out;
  for (int k = 0; k < m; ++k) {
    GridFunction g{op.grid, eig.vectors.col(k)};
    g.normalize();
    out.push_back(std::move(g));
  }
  return out;
}

double richardson(double h1, double E1, double h2, double E2) {
  return (h1 * h1 * E2 - h2 * h2 * E1) / (h1 * h1 - h2 * h2);
}

SpectrumReport compare_spectra(const PotentialFamily& fam, const ParamSet& p, int n_max,
                               const CompareOptions& options) {
  SpectrumReport rep = algebraic_spectrum(fam, p, n_max);
  if (auto why = fam.numerics_unsupported(p))
    throw std::invalid_argument(std::string(fam.id()) + ": grid eigensolver unsupported for " + p.to_string() + ": " +
                                *why);
  const int m = static_cast<int>(rep.levels.size());
  GridOptions gopt;
  gopt.strategy = options.strategy;
  const GridPtr coarse = build_grid(fam, p, options.N, gopt);
  const GridPtr fine = build_grid(fam, p, 2 * options.N, gopt);
  const Eigen::VectorXd e1 = numerical_spectrum(discretize_hamiltonian(fam, p, Partner::minus, coarse), m);
  const Eigen::VectorXd e2 = numerical_spectrum(discretize_hamiltonian(fam, p, Partner::minus, fine), m);

  rep.coordinate = coarse->coordinate;
  rep.N_coarse = options.N;
  rep.N_fine = 2 * options.N;
  rep.h_coarse = coarse->spacing;
  rep.h_fine = fine->spacing;
  rep.lower = coarse->lower;
  rep.upper = coarse->upper;
  rep.extrapolation = "richardson-h2";
  rep.rel_tol = options.rel_tol;
  rep.abs_tol = options.abs_tol;
  rep.pass = true;
  for (int k = 0; k < m; ++k) {
    SpectrumLevel& lv = rep.levels[k];
    lv.E_coarse = e1(k);
    lv.E_fine = e2(k);
    lv.E_numeric = richardson(rep.h_coarse, e1(k), rep.h_fine, e2(k));
    lv.abs_err = std::abs(*lv.E_numeric - lv.E_algebraic);
    lv.rel_err = lv.E_algebraic != 0.0 ? lv.abs_err / std::abs(lv.E_algebraic) : lv.abs_err;
    lv.pass = lv.E_algebraic == 0.0 ? lv.abs_err <= options.abs_tol : lv.rel_err <= options.rel_tol;
    rep.pass = rep.pass && lv.pass;
  }
  return rep;
}

Eigen::VectorXd convergence_order(const PotentialFamily& fam, const ParamSet& p, int m, int N,
                                  std::optional<GridStrategy> strategy) {
  GridOptions gopt;
  gopt.strategy = strategy;
  Eigen::MatrixXd E(m, 3);
  for (int j = 0; j < 3; ++j) {
    const GridPtr g = build_grid(fam, p, N << j, gopt);
    E.col(j) = numerical_spectrum(discretize_hamiltonian(fam, p, Partner::minus, g), m);
  }
  Eigen::VectorXd order(m);
  for (int k = 0; k < m; ++k) order(k) = std::log2((E(k, 0) - E(k, 1)) / (E(k, 1) - E(k, 2)));
  return order;
}

}  // namespace pdm
