#include "pdm/algebra.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pdm {

namespace {

std::optional<double> opt_sum(std::optional<double> a, std::optional<double> b, double scale) {
  if (!a) return std::nullopt;
  return *a + scale * b.value_or(0.0);
}

std::optional<double> opt_diff(std::optional<double> a, std::optional<double> b) {
  if (!a) return std::nullopt;
  return *a - b.value_or(0.0);
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

bool close(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || close(*a, *b);
}

Window shrink(Window w, Shift dir) {
  if (w.size() < 2) throw std::invalid_argument("lattice window exhausted");
  return dir == Shift::T ? Window{w.lo, w.hi - 1} : Window{w.lo + 1, w.hi};
}

LatticeState blank_like(const LatticeState& s, Window w) {
  return {s.grid, s.K, w, Eigen::MatrixXd::Zero(s.values.rows(), s.values.cols())};
}

void require_R_valid(const ParamLattice& lattice, Window w, int m) {
  for (int k = w.lo; k <= w.hi; ++k) lattice.family().require_valid(lattice.at(k + m));
}

double window_norm2(const LatticeState& s, Window w) {
  double acc = 0.0;
  for (int k = w.lo; k <= w.hi; ++k) acc += s.slice(k).squaredNorm();
  return acc;
}

double window_dot(const LatticeState& a, const LatticeState& b, Window w) {
  double acc = 0.0;
  for (int k = w.lo; k <= w.hi; ++k) acc += a.slice(k).dot(b.slice(k));
  return acc;
}

LatticeState scaled(const LatticeState& s, double c) {
  LatticeState out = s;
  out.values *= c;
  return out;
}

LatticeExpr scaled(const LatticeExpr& e, double c) {
  return {[fn = e.fn, c](const Jetd& x, int k) { return c * fn(x, k); }, e.window, e.depth};
}

// Sum over j = 0..n-1 of R_j, applied to a state.
template <class State>
State apply_R_sum(const State& s, int n, const ParamLattice& lattice) {
  State acc = apply_R(s, 0, lattice);
  for (int j = 1; j < n; ++j) acc = combine(acc, 1.0, apply_R(s, j, lattice));
  return acc;
}

template <class State>
State power_B(State s, Ladder sign, int n, const ParamLattice& lattice) {
  for (int i = 0; i < n; ++i) s = apply_B(s, sign, lattice);
  return s;
}

// [B, R_{-1}] psi = B R_{-1} psi - R_{-1} B psi.
template <class State>
State commutator_BR(const State& s, Ladder sign, const ParamLattice& lattice) {
  return combine(apply_B(apply_R(s, -1, lattice), sign, lattice), -1.0,
                 apply_R(apply_B(s, sign, lattice), -1, lattice));
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamLattice

ParamLattice::ParamLattice(FamilyPtr family, const ParamSet& base, int K)
    : family_(std::move(family)), base_(base), K_(K) {
  if (K < 1) throw std::invalid_argument("lattice half-width K must be at least 1");
  if (family_->id() == "gen2")
    throw std::invalid_argument("gen2 has a non-affine parameter step and has no lattice realization");
  family_->require_valid(base);
  const ParamSet next = family_->step(base);
  eta_.lambda = next.lambda - base.lambda;
  eta_.alpha = next.alpha - base.alpha;
  eta_.mu = opt_diff(next.mu, base.mu);
  eta_.beta = opt_diff(next.beta, base.beta);

  for (int k = -K; k < K; ++k) {
    const ParamSet a = family_->step(at(k)), b = at(k + 1);
    if (!close(a.lambda, b.lambda) || !close(a.alpha, b.alpha) || !close(a.mu, b.mu) || !close(a.beta, b.beta))
      throw std::invalid_argument(std::string(family_->id()) + ": parameter step is not a fixed translation");
  }
}

ParamSet ParamLattice::at(int k) const {
  ParamSet p;
  p.lambda = base_.lambda + k * eta_.lambda;
  p.alpha = base_.alpha + k * eta_.alpha;
  p.mu = opt_sum(base_.mu, eta_.mu, k);
  p.beta = opt_sum(base_.beta, eta_.beta, k);
  return p;
}

std::vector<int> ParamLattice::invalid_indices() const {
  std::vector<int> out;
  for (int k = -K_; k <= K_; ++k)
    if (!valid(k)) out.push_back(k);
  return out;
}

double ParamLattice::R(int k) const { return family_->remainder(at(k)); }

Window intersect(Window a, Window b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

// ---------------------------------------------------------------------------
// Finite-difference path

LatticeState apply_shift(const LatticeState& s, Shift dir) {
  const Window w = shrink(s.window, dir);
  LatticeState out = blank_like(s, w);
  const int off = dir == Shift::T ? 1 : -1;
  for (int k = w.lo; k <= w.hi; ++k) out.slice(k) = s.slice(k + off);
  return out;
}

LatticeState apply_B(const LatticeState& s, Ladder sign, const ParamLattice& lattice) {
  const bool plus = sign == Ladder::plus;
  const Window w = shrink(s.window, plus ? Shift::T : Shift::Tdag);
  LatticeState out = blank_like(s, w);
  for (int k = w.lo; k <= w.hi; ++k) {
    const int src = plus ? k + 1 : k - 1;
    const ParamSet p = lattice.at(plus ? k : k - 1);
    const GridFunction in{s.grid, s.slice(src)};
    out.slice(k) = apply_ladder(lattice.family(), p, sign, in).values;
  }
  return out;
}

LatticeState apply_R(const LatticeState& s, int m, const ParamLattice& lattice) {
  require_R_valid(lattice, s.window, m);
  LatticeState out = blank_like(s, s.window);
  for (int k = s.window.lo; k <= s.window.hi; ++k) out.slice(k) = lattice.R(k + m) * s.slice(k);
  return out;
}

LatticeState apply_Hminus(const LatticeState& s, const ParamLattice& lattice) {
  LatticeState out = blank_like(s, s.window);
  for (int k = s.window.lo; k <= s.window.hi; ++k) {
    const GridFunction in{s.grid, s.slice(k)};
    out.slice(k) = apply_hamiltonian_fd(lattice.family(), lattice.at(k), Partner::minus, in).values;
  }
  return out;
}

LatticeState combine(const LatticeState& a, double c, const LatticeState& b) {
  const Window w = intersect(a.window, b.window);
  if (w.empty()) throw std::invalid_argument("lattice states have disjoint windows");
  LatticeState out = blank_like(a, w);
  for (int k = w.lo; k <= w.hi; ++k) out.slice(k) = a.slice(k) + c * b.slice(k);
  return out;
}

double relative_defect(const LatticeState& a, const LatticeState& b, const LatticeState& reference) {
  const Window w = intersect(intersect(a.window, b.window), reference.window);
  if (w.empty()) throw std::invalid_argument("lattice states have disjoint windows");
  double num = 0.0;
  for (int k = w.lo; k <= w.hi; ++k) num += (a.slice(k) - b.slice(k)).squaredNorm();
  return std::sqrt(num) / std::max(std::sqrt(window_norm2(reference, w)), 1e-300);
}

// ---------------------------------------------------------------------------
// Analytic path

LatticeExpr apply_shift(const LatticeExpr& e, Shift dir) {
  const int off = dir == Shift::T ? 1 : -1;
  return {[fn = e.fn, off](const Jetd& x, int k) { return fn(x, k + off); }, shrink(e.window, dir), e.depth};
}

LatticeExpr apply_B(const LatticeExpr& e, Ladder sign, const ParamLattice& lattice) {
  const bool plus = sign == Ladder::plus;
  const Window w = shrink(e.window, plus ? Shift::T : Shift::Tdag);
  auto fn = [fn = e.fn, sign, plus, &lattice](const Jetd& x, int k) {
    return ladder_jet(lattice.family(), lattice.at(plus ? k : k - 1), sign, x, fn(x, plus ? k + 1 : k - 1));
  };
  return {fn, w, e.depth + 1};
}

LatticeExpr apply_R(const LatticeExpr& e, int m, const ParamLattice& lattice) {
  require_R_valid(lattice, e.window, m);
  return {[fn = e.fn, m, &lattice](const Jetd& x, int k) { return lattice.R(k + m) * fn(x, k); }, e.window, e.depth};
}

LatticeExpr apply_Hminus(const LatticeExpr& e, const ParamLattice& lattice) {
  auto fn = [fn = e.fn, &lattice](const Jetd& x, int k) {
    return hamiltonian_jet(lattice.family(), lattice.at(k), Partner::minus, x, fn(x, k));
  };
  return {fn, e.window, e.depth + 2};
}

LatticeExpr combine(const LatticeExpr& a, double c, const LatticeExpr& b) {
  const Window w = intersect(a.window, b.window);
  if (w.empty()) throw std::invalid_argument("lattice states have disjoint windows");
  return {[fa = a.fn, fb = b.fn, c](const Jetd& x, int k) { return fa(x, k) + c * fb(x, k); }, w,
          std::max(a.depth, b.depth)};
}

LatticeState evaluate(const LatticeExpr& e, GridPtr grid, int K, std::optional<Window> only) {
  const Window w = only ? intersect(e.window, *only) : e.window;
  if (w.lo < -K || w.hi > K) throw std::invalid_argument("expression window exceeds the lattice");
  LatticeState out{grid, K, w, Eigen::MatrixXd::Zero(grid->size(), 2 * K + 1)};
  for (int k = w.lo; k <= w.hi; ++k)
    for (Eigen::Index i = 0; i < grid->size(); ++i)
      out.values(i, out.column(k)) = e.fn(Jetd::variable(grid->x(i), e.depth), k).value();
  return out;
}

LatticeExpr BumpState::expr(int K) const {
  auto fn = [*this](const Jetd& x, int k) {
    const Jetd r = (x - center) / width;
    return (1.0 + 0.3 * std::sin(k_rate * k + k_phase)) * exp(-0.5 * r * r);
  };
  return {fn, Window{-K, K}, 0};
}

std::vector<BumpState> random_bump_states(const Grid& grid, int count, std::uint64_t seed) {
  const double len = grid.upper - grid.lower, mid = 0.5 * (grid.lower + grid.upper);
  std::mt19937_64 rng(seed);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  std::vector<BumpState> out;
  for (int i = 0; i < count; ++i) {
    BumpState b;
    b.center = mid + u(-0.1, 0.1) * len;
    b.width = u(0.032, 0.048) * len;
    b.k_rate = u(0.3, 0.9);
    b.k_phase = u(0.0, 2.0 * M_PI);
    out.push_back(b);
  }
  return out;
}

std::pair<double, double> default_lattice_bounds(const PotentialFamily& fam, const ParamSet& p) {
  const DomainSpec d = fam.domain();
  const double ref = d.reference_point();
  const double f_ref = fam.f(ref, p);
  auto reach = [&](int dir) {
    double t = 10.0;
    if (fam.f(ref + dir * t, p) > 1e3 * f_ref) {
      double lo = 0.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + t);
        (fam.f(ref + dir * mid, p) > 1e3 * f_ref ? t : lo) = mid;
      }
    }
    return ref + dir * t;
  };
  return {std::isfinite(d.lower) ? d.lower : reach(-1), std::isfinite(d.upper) ? d.upper : reach(1)};
}

std::optional<double> commutator_scalar_closed_form(const PotentialFamily& fam, const ParamSet& p) {
  if (fam.id() == "ex1") return 2.0 * p.lambda - p.alpha;
  if (fam.id() == "ex2") return 2.0 * (p.lambda - p.alpha * p.mu_or_zero()) + p.alpha * p.alpha - 1.0;
  return std::nullopt;
}

LatticeExpr ground_state_lattice(const ParamLattice& lattice) {
  const PotentialFamily& fam = lattice.family();
  if (fam.regime(lattice.at(0)) != Regime::unbroken)
    throw RegimeError(std::string(fam.id()) + ": no normalizable annihilated state at " + lattice.at(0).to_string());
  // Largest contiguous window around 0 where every point is valid and unbroken.
  auto good = [&](int k) { return lattice.valid(k) && fam.regime(lattice.at(k)) == Regime::unbroken; };
  Window w{0, 0};
  while (w.lo > -lattice.K() && good(w.lo - 1)) --w.lo;
  while (w.hi < lattice.K() && good(w.hi + 1)) ++w.hi;
  auto fn = [&lattice](const Jetd& x, int k) { return lattice.family().ground_state(x, lattice.at(k)); };
  return {fn, w, 0};
}

// ---------------------------------------------------------------------------
// Checks

CommutatorReport check_commutator_BB(const ParamLattice& lattice, GridPtr grid, const std::vector<BumpState>& states) {
  const int K = lattice.K();
  CommutatorReport rep;
  rep.scalar_k0 = lattice.R(-1);
  for (const BumpState& b : states) {
    const LatticeExpr psi = b.expr(K);
    {
      const LatticeExpr mp = apply_B(apply_B(psi, Ladder::plus, lattice), Ladder::minus, lattice);
      const LatticeExpr pm = apply_B(apply_B(psi, Ladder::minus, lattice), Ladder::plus, lattice);
      const LatticeState lhs = evaluate(combine(mp, -1.0, pm), grid, K);
      const LatticeState rhs = evaluate(apply_R(psi, -1, lattice), grid, K);
      rep.bb.analytic = std::max(rep.bb.analytic, relative_defect(lhs, rhs, rhs));
      const LatticeState h = evaluate(apply_Hminus(psi, lattice), grid, K);
      rep.factorization.analytic = std::max(rep.factorization.analytic, relative_defect(evaluate(pm, grid, K), h, h));
    }
    {
      const LatticeState psi_s = evaluate(psi, grid, K);
      const LatticeState mp = apply_B(apply_B(psi_s, Ladder::plus, lattice), Ladder::minus, lattice);
      const LatticeState pm = apply_B(apply_B(psi_s, Ladder::minus, lattice), Ladder::plus, lattice);
      const LatticeState lhs = combine(mp, -1.0, pm);
      const LatticeState rhs = apply_R(psi_s, -1, lattice);
      rep.bb.fd = std::max(rep.bb.fd, relative_defect(lhs, rhs, rhs));
      const LatticeState h = apply_Hminus(psi_s, lattice);
      rep.factorization.fd = std::max(rep.factorization.fd, relative_defect(pm, h, h));
    }
  }
  return rep;
}

IntertwiningReport check_intertwining(const ParamLattice& lattice, int n, GridPtr grid,
                                      const std::vector<BumpState>& states) {
  const int K = lattice.K();
  if (n < 1) throw std::invalid_argument("intertwining power n must be at least 1");
  if (2 * K + 1 < 2 * n + 2) throw std::invalid_argument("lattice window too small for the requested power");
  IntertwiningReport rep;
  rep.n = n;
  for (int j = 0; j < n; ++j) rep.scalar_sum_k0 += lattice.R(j);

  for (const BumpState& b : states) {
    const LatticeExpr psi = b.expr(K);
    const LatticeState psi_s = evaluate(psi, grid, K);

    for (int m = -1; m <= 1; ++m) {
      const LatticeState a = apply_R(apply_B(psi_s, Ladder::plus, lattice), m, lattice);
      const LatticeState c = apply_B(apply_R(psi_s, m - 1, lattice), Ladder::plus, lattice);
      rep.r_b_plus = std::max(rep.r_b_plus, relative_defect(a, c, a));
      const LatticeState d = apply_R(apply_B(psi_s, Ladder::minus, lattice), m, lattice);
      const LatticeState e = apply_B(apply_R(psi_s, m + 1, lattice), Ladder::minus, lattice);
      rep.r_b_minus = std::max(rep.r_b_minus, relative_defect(d, e, d));
    }

    {
      const LatticeExpr bn = power_B(psi, Ladder::plus, n, lattice);
      const LatticeExpr lhs =
          combine(apply_Hminus(bn, lattice), -1.0, power_B(apply_Hminus(psi, lattice), Ladder::plus, n, lattice));
      const LatticeState l = evaluate(lhs, grid, K), r = evaluate(apply_R_sum(bn, n, lattice), grid, K);
      rep.h_b_plus.analytic = std::max(rep.h_b_plus.analytic, relative_defect(l, r, r));

      const LatticeExpr cn = power_B(psi, Ladder::minus, n, lattice);
      const LatticeExpr lhs2 =
          combine(apply_Hminus(cn, lattice), -1.0, power_B(apply_Hminus(psi, lattice), Ladder::minus, n, lattice));
      const LatticeExpr rhs2 = scaled(power_B(apply_R_sum(psi, n, lattice), Ladder::minus, n, lattice), -1.0);
      const LatticeState l2 = evaluate(lhs2, grid, K), r2 = evaluate(rhs2, grid, K);
      rep.h_b_minus.analytic = std::max(rep.h_b_minus.analytic, relative_defect(l2, r2, r2));
    }
    {
      const LatticeState bn = power_B(psi_s, Ladder::plus, n, lattice);
      const LatticeState lhs =
          combine(apply_Hminus(bn, lattice), -1.0, power_B(apply_Hminus(psi_s, lattice), Ladder::plus, n, lattice));
      const LatticeState rhs = apply_R_sum(bn, n, lattice);
      rep.h_b_plus.fd = std::max(rep.h_b_plus.fd, relative_defect(lhs, rhs, rhs));

      const LatticeState cn = power_B(psi_s, Ladder::minus, n, lattice);
      const LatticeState lhs2 =
          combine(apply_Hminus(cn, lattice), -1.0, power_B(apply_Hminus(psi_s, lattice), Ladder::minus, n, lattice));
      const LatticeState rhs2 = scaled(power_B(apply_R_sum(psi_s, n, lattice), Ladder::minus, n, lattice), -1.0);
      rep.h_b_minus.fd = std::max(rep.h_b_minus.fd, relative_defect(lhs2, rhs2, rhs2));
    }
  }
  return rep;
}

ExactIdentityReport check_exact_identities(const ParamLattice& lattice, GridPtr grid,
                                           const std::vector<BumpState>& states) {
  const int K = lattice.K();
  ExactIdentityReport rep;
  for (const BumpState& b : states) {
    const LatticeState psi = evaluate(b.expr(K), grid, K);
    const LatticeState ttd = apply_shift(apply_shift(psi, Shift::Tdag), Shift::T);
    const LatticeState tdt = apply_shift(apply_shift(psi, Shift::T), Shift::Tdag);
    rep.shift_inverse = std::max({rep.shift_inverse, relative_defect(ttd, psi, psi), relative_defect(tdt, psi, psi)});
    for (int m = -1; m <= 1; ++m) {
      const LatticeState conj = apply_shift(apply_R(apply_shift(psi, Shift::Tdag), m, lattice), Shift::T);
      const LatticeState next = apply_R(psi, m + 1, lattice);
      rep.shift_conjugation = std::max(rep.shift_conjugation, relative_defect(conj, next, next));
      const LatticeState a = apply_R(apply_B(psi, Ladder::plus, lattice), m, lattice);
      const LatticeState c = apply_B(apply_R(psi, m - 1, lattice), Ladder::plus, lattice);
      rep.r_b_plus = std::max(rep.r_b_plus, relative_defect(a, c, a));
      const LatticeState d = apply_R(apply_B(psi, Ladder::minus, lattice), m, lattice);
      const LatticeState e = apply_B(apply_R(psi, m + 1, lattice), Ladder::minus, lattice);
      rep.r_b_minus = std::max(rep.r_b_minus, relative_defect(d, e, d));
    }
  }
  return rep;
}

RCommutatorReport check_R_commutators(const ParamLattice& lattice, GridPtr grid,
                                      const std::vector<BumpState>& states) {
  const int K = lattice.K();
  if (2 * K + 1 < 4) throw std::invalid_argument("lattice window too small for R commutators");
  RCommutatorReport rep;
  rep.expected = lattice.R(0) - lattice.R(-1);
  rep.table_value = tabulated_R_coefficient(lattice.family(), lattice.at(0));

  struct Sampled {
    LatticeState comm, image;
  };
  std::vector<Sampled> plus, minus, plus_fd, minus_fd;
  double pp = 0, pi = 0, mp = 0, mi = 0;
  for (const BumpState& b : states) {
    const LatticeExpr psi = b.expr(K);
    const LatticeState psi_s = evaluate(psi, grid, K);
    plus.push_back({evaluate(commutator_BR(psi, Ladder::plus, lattice), grid, K),
                    evaluate(apply_B(psi, Ladder::plus, lattice), grid, K)});
    minus.push_back({evaluate(commutator_BR(psi, Ladder::minus, lattice), grid, K),
                     evaluate(apply_B(psi, Ladder::minus, lattice), grid, K)});
    plus_fd.push_back({commutator_BR(psi_s, Ladder::plus, lattice), apply_B(psi_s, Ladder::plus, lattice)});
    minus_fd.push_back({commutator_BR(psi_s, Ladder::minus, lattice), apply_B(psi_s, Ladder::minus, lattice)});
    const Window wp = intersect(plus.back().comm.window, plus.back().image.window);
    pp += window_dot(plus.back().image, plus.back().comm, wp);
    pi += window_norm2(plus.back().image, wp);
    const Window wm = intersect(minus.back().comm.window, minus.back().image.window);
    mp += window_dot(minus.back().image, minus.back().comm, wm);
    mi += window_norm2(minus.back().image, wm);

    // [B+, [B+, R_{-1}]] psi = B+ C psi - C B+ psi with C = [B+, R_{-1}].
    const LatticeExpr c_psi = commutator_BR(psi, Ladder::plus, lattice);
    const LatticeExpr outer = apply_B(c_psi, Ladder::plus, lattice);
    const LatticeExpr inner = commutator_BR(apply_B(psi, Ladder::plus, lattice), Ladder::plus, lattice);
    const LatticeState o = evaluate(outer, grid, K);
    rep.double_commutator = std::max(rep.double_commutator, relative_defect(o, evaluate(inner, grid, K), o));
  }
  rep.c_plus = pp / pi;
  rep.c_minus = -mp / mi;

  auto defect = [](const std::vector<Sampled>& v, double c) {
    double worst = 0.0;
    for (const Sampled& s : v) {
      const LatticeState model = scaled(s.image, c);
      worst = std::max(worst, relative_defect(s.comm, model, model));
    }
    return worst;
  };
  rep.plus_defect = {defect(plus, rep.expected), defect(plus_fd, rep.expected)};
  rep.minus_defect = {defect(minus, -rep.expected), defect(minus_fd, -rep.expected)};
  return rep;
}

std::optional<double> tabulated_R_coefficient(const PotentialFamily& fam, const ParamSet& p) {
  const std::string_view id = fam.id();
  if (id == "ex1") return 2.0 * p.alpha;
  if (id == "ex2") return 2.0 * (1.0 - p.alpha * p.alpha);
  if (id == "t1r1") return 8.0 * p.alpha;
  if (id == "t1r2") return 2.0 * (1.0 + p.alpha);
  if (id == "t1r3") return 2.0 * (1.0 + p.beta_or_zero());
  if (id == "t1r4") return p.alpha - 1.0;
  return std::nullopt;
}

LadderReport check_ladder_eigenstates(const ParamLattice& lattice, int n_max, GridPtr grid) {
  const int K = lattice.K();
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  const LatticeExpr psi = ground_state_lattice(lattice);
  if (psi.window.hi < n_max)
    throw std::invalid_argument("ground-state lattice does not reach index n_max; enlarge K or move the base");
  LadderReport rep;
  {
    const LatticeState g = evaluate(psi, grid, K);
    const LatticeState bm = evaluate(apply_B(psi, Ladder::minus, lattice), grid, K);
    LatticeState zero = bm;
    zero.values.setZero();
    rep.annihilation = relative_defect(bm, zero, g);
  }
  const Window at0{0, 0};
  double expected = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) expected += lattice.R(n - 1);
    const LatticeExpr chi = power_B(psi, Ladder::plus, n, lattice);
    const LatticeState c = evaluate(chi, grid, K, at0);
    const LatticeState h = evaluate(apply_Hminus(chi, lattice), grid, K, at0);
    LadderLevel lv;
    lv.n = n;
    lv.expected = expected;
    lv.rayleigh = window_dot(c, h, at0) / window_norm2(c, at0);
    const double r = (h.slice(0) - expected * c.slice(0)).norm();
    lv.residual = r / c.slice(0).norm();
    const double hn = h.slice(0).norm();
    lv.identity_defect = hn > 0 ? r / hn : 0.0;
    lv.tail_growth = tail_growth(c.slice(0));
    rep.levels.push_back(lv);
  }
  return rep;
}

}  // namespace pdm
