#include "pdm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pdm {

namespace {

constexpr double kMaxSearchLength = 1e6;

double max_log_on(const PotentialFamily& fam, const ParamSet& p, double a, double b) {
  constexpr int samples = 2001;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double x = a + (i + 0.5) * (b - a) / samples;
    const double v = fam.log_ground_state(x, p);
    if (std::isfinite(v)) best = std::max(best, v);
  }
  return best;
}

// Smallest bound between `inside` and `outside` where the log-state has
// dropped below `level`; the outside end is known to satisfy it.
double refine_bound(const PotentialFamily& fam, const ParamSet& p, double inside, double outside, double level) {
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (fam.log_ground_state(mid, p) < level)
      outside = mid;
    else
      inside = mid;
  }
  return outside;
}

void require_same_family(const PotentialFamily& fam, const Grid& grid) {
  if (grid.family_id != fam.id())
    throw std::invalid_argument("grid/family mismatch: grid built for " + grid.family_id + ", operator for " +
                                std::string(fam.id()));
}

void require_direct(const Grid& grid, const char* what) {
  if (grid.mapped()) throw std::invalid_argument(std::string(what) + " requires a direct-x grid");
}

}  // namespace

TruncationBounds truncation_bounds(const PotentialFamily& fam, const ParamSet& p, double relative) {
  fam.require_valid(p);
  const DomainSpec d = fam.domain();
  const double ref = d.reference_point();
  const double drop = std::log(relative);
  const bool open_lo = !std::isfinite(d.lower), open_hi = !std::isfinite(d.upper);
  if (!open_lo && !open_hi) return {d.lower, d.upper};

  double prev = 0.0;
  for (double len = 1.0; len <= kMaxSearchLength; prev = len, len *= 2.0) {
    const double lo = open_lo ? ref - len : d.lower;
    const double hi = open_hi ? ref + len : d.upper;
    const double peak = max_log_on(fam, p, lo, hi);
    const double level = peak + drop;
    const bool lo_ok = !open_lo || fam.log_ground_state(lo, p) < level;
    const bool hi_ok = !open_hi || fam.log_ground_state(hi, p) < level;
    if (lo_ok && hi_ok && std::isfinite(peak)) {
      TruncationBounds tb{lo, hi};
      if (open_lo) tb.lower = refine_bound(fam, p, ref - prev, lo, level);
      if (open_hi) tb.upper = refine_bound(fam, p, ref + prev, hi, level);
      return tb;
    }
  }
  throw NumericalBreakdown(std::string(fam.id()) + ": truncation bound not found within 1e6 length units for " +
                           p.to_string());
}

GridPtr build_grid(const PotentialFamily& fam, const ParamSet& p, int N, const GridOptions& options) {
  if (N < 16) throw std::invalid_argument("grid size N must be at least 16");
  fam.require_valid(p);
  const DomainSpec d = fam.domain();

  auto grid = std::make_shared<Grid>();
  grid->family_id = std::string(fam.id());
  grid->params = p;
  grid->nodes.resize(N);
  grid->x.resize(N);

  GridStrategy strategy = options.strategy.value_or(d.grid_strategy);
  if (options.bounds) strategy = GridStrategy::truncated;

  if (strategy == GridStrategy::truncated) {
    double lo, hi;
    if (options.bounds) {
      std::tie(lo, hi) = *options.bounds;
      if (!(lo < hi) || lo < d.lower || hi > d.upper)
        throw std::invalid_argument("explicit grid bounds must be an increasing interval inside the domain");
    } else {
      const TruncationBounds tb = truncation_bounds(fam, p);
      lo = tb.lower;
      hi = tb.upper;
    }
    grid->coordinate = Coordinate::direct_x;
    grid->lower = lo;
    grid->upper = hi;
    grid->spacing = (hi - lo) / (N + 1);
    for (int i = 0; i < N; ++i) grid->nodes(i) = grid->x(i) = lo + (i + 1) * grid->spacing;
    return grid;
  }

  // Mapped: uniform in u over the u-image of the domain.  A decay-at-infinity
  // end whose u-image is infinite, or whose truncation point sits well inside
  // the finite u-image, is clipped at the truncation point.
  const double u_ref = fam.to_mapped(d.reference_point(), p);
  double u_lo = fam.to_mapped(d.lower, p), u_hi = fam.to_mapped(d.upper, p);
  const bool decay_lo = d.lower_kind == EndpointKind::decay_at_infinity;
  const bool decay_hi = d.upper_kind == EndpointKind::decay_at_infinity;
  if (decay_lo || decay_hi) {
    std::optional<TruncationBounds> tb;
    try {
      tb = truncation_bounds(fam, p);
    } catch (const NumericalBreakdown&) {
      if (!std::isfinite(u_lo) || !std::isfinite(u_hi)) throw;
    }
    if (tb && decay_lo) {
      const double ut = fam.to_mapped(tb->lower, p);
      if (!std::isfinite(u_lo) || ut - u_lo > 0.1 * (u_ref - u_lo)) u_lo = ut;
    }
    if (tb && decay_hi) {
      const double ut = fam.to_mapped(tb->upper, p);
      if (!std::isfinite(u_hi) || u_hi - ut > 0.1 * (u_hi - u_ref)) u_hi = ut;
    }
  }
  if (!(std::isfinite(u_lo) && std::isfinite(u_hi) && u_lo < u_hi))
    throw NumericalBreakdown(std::string(fam.id()) + ": mapped interval is empty or unbounded");

  grid->coordinate = Coordinate::mapped_u;
  grid->lower = u_lo;
  grid->upper = u_hi;
  grid->spacing = (u_hi - u_lo) / (N + 1);
  for (int i = 0; i < N; ++i) {
    grid->nodes(i) = u_lo + (i + 1) * grid->spacing;
    grid->x(i) = fam.from_mapped(grid->nodes(i), p);
    if (!d.contains(grid->x(i)) || (i > 0 && !(grid->x(i) > grid->x(i - 1))))
      throw NumericalBreakdown(std::string(fam.id()) + ": inverse map left the domain; grid too fine near a wall");
  }
  return grid;
}

GridFunction& GridFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalBreakdown("cannot normalize a zero or non-finite state");
  values /= n;
  return *this;
}

Eigen::VectorXd GridFunction::physical(const PotentialFamily& fam) const {
  if (!grid->mapped()) return values;
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) out(i) = values(i) / std::sqrt(fam.f(grid->x(i), grid->params));
  return out;
}

int GridFunction::node_count(double floor) const {
  const double cut = floor * values.cwiseAbs().maxCoeff();
  int count = 0, last = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) <= cut) continue;
    const int s = values(i) > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

double tail_growth(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index n = v.size();
  if (n < 60) throw std::invalid_argument("tail_growth needs at least 60 nodes");
  const Eigen::Index outer = n / 20, band = 2 * outer;
  const Eigen::VectorXd a = v.cwiseAbs();
  auto ratio = [](double edge, double inner) {
    if (inner > 0.0) return edge / inner;
    return edge > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  const double lo = ratio(a.head(outer).maxCoeff(), a.segment(outer, band).maxCoeff());
  const double hi = ratio(a.tail(outer).maxCoeff(), a.segment(n - outer - band, band).maxCoeff());
  return std::max(lo, hi);
}

GridFunction sample(const PotentialFamily& fam, const StateFn& psi, GridPtr grid, int order) {
  GridFunction out{grid, Eigen::VectorXd(grid->size())};
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    const double x = grid->x(i);
    double v = psi(Jetd::variable(x, order)).value();
    if (grid->mapped()) v *= std::sqrt(fam.f(x, grid->params));
    out.values(i) = v;
  }
  return out;
}

Eigen::VectorXd TridiagonalOperator::apply(const Eigen::VectorXd& v) const {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd out = diag.cwiseProduct(v);
  out.head(n - 1) += offdiag.cwiseProduct(v.tail(n - 1));
  out.tail(n - 1) += offdiag.cwiseProduct(v.head(n - 1));
  return out;
}

TridiagonalOperator discretize_hamiltonian(const PotentialFamily& fam, const ParamSet& p, Partner which,
                                           GridPtr grid) {
  require_same_family(fam, *grid);
  const Eigen::Index n = grid->size();
  const double h = grid->spacing, h2 = h * h;
  TridiagonalOperator op{Eigen::VectorXd(n), Eigen::VectorXd(n - 1), grid, which};

  if (grid->mapped()) {
    for (Eigen::Index i = 0; i < n; ++i) op.diag(i) = 2.0 / h2 + partner_potential(fam, p, which, grid->x(i));
    op.offdiag.setConstant(-1.0 / h2);
  } else {
    auto g = [&](double x) { return std::pow(fam.f(x, p), 2); };
    double g_left = g(grid->x(0) - 0.5 * h);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double g_right = g(grid->x(i) + 0.5 * h);
      op.diag(i) = (g_left + g_right) / h2 + effective_potential(fam, p, which, grid->x(i)).Veff;
      if (i + 1 < n) op.offdiag(i) = -g_right / h2;
      g_left = g_right;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(op.diag(i))) {
      std::ostringstream os;
      os << fam.id() << ": potential is not finite at node x = " << grid->x(i) << " (grid too close to a wall)";
      throw NumericalBreakdown(os.str());
    }
  }
  return op;
}

Eigen::VectorXd fd_first_derivative(const Eigen::VectorXd& v, double h) {
  const Eigen::Index n = v.size();
  if (n < 5) throw std::invalid_argument("fd_first_derivative needs at least 5 points");
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 2; i + 2 < n; ++i) d(i) = v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2);
  d(0) = -25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3) - 3.0 * v(4);
  d(1) = -3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4);
  d(n - 1) = 25.0 * v(n - 1) - 48.0 * v(n - 2) + 36.0 * v(n - 3) - 16.0 * v(n - 4) + 3.0 * v(n - 5);
  d(n - 2) = 3.0 * v(n - 1) + 10.0 * v(n - 2) - 18.0 * v(n - 3) + 6.0 * v(n - 4) - v(n - 5);
  return d / (12.0 * h);
}

Eigen::VectorXd fd_second_derivative(const Eigen::VectorXd& v, double h) {
  const Eigen::Index n = v.size();
  if (n < 6) throw std::invalid_argument("fd_second_derivative needs at least 6 points");
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 2; i + 2 < n; ++i)
    d(i) = -v(i - 2) + 16.0 * v(i - 1) - 30.0 * v(i) + 16.0 * v(i + 1) - v(i + 2);
  auto edge0 = [&](auto at) { return 45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) - 10.0 * at(5); };
  auto edge1 = [&](auto at) { return 10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4) + at(5); };
  auto fwd = [&](Eigen::Index k) { return v(k); };
  auto bwd = [&](Eigen::Index k) { return v(n - 1 - k); };
  d(0) = edge0(fwd);
  d(1) = edge1(fwd);
  d(n - 1) = edge0(bwd);
  d(n - 2) = edge1(bwd);
  return d / (12.0 * h * h);
}

GridFunction apply_ladder(const PotentialFamily& fam, const ParamSet& p, Ladder sign, const GridFunction& psi) {
  require_same_family(fam, *psi.grid);
  require_direct(*psi.grid, "apply_ladder");
  const Grid& g = *psi.grid;
  const Eigen::VectorXd d = fd_first_derivative(psi.values, g.spacing);
  GridFunction out{psi.grid, Eigen::VectorXd(g.size())};
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const FamilyValues v = fam.values(g.x(i), p);
    const double kinetic = v.f * d(i) + 0.5 * v.fx * psi.values(i);
    out.values(i) = v.W * psi.values(i) + (sign == Ladder::minus ? kinetic : -kinetic);
  }
  return out;
}

GridFunction apply_ladder(const PotentialFamily& fam, const ParamSet& p, Ladder sign, const StateFn& psi,
                          GridPtr grid) {
  require_same_family(fam, *grid);
  require_direct(*grid, "apply_ladder");
  GridFunction out{grid, Eigen::VectorXd(grid->size())};
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    const Jetd x = Jetd::variable(grid->x(i), 1);
    out.values(i) = ladder_jet(fam, p, sign, x, psi(x)).value();
  }
  return out;
}

GridFunction apply_hamiltonian_fd(const PotentialFamily& fam, const ParamSet& p, Partner which,
                                  const GridFunction& psi) {
  require_same_family(fam, *psi.grid);
  require_direct(*psi.grid, "apply_hamiltonian_fd");
  const Grid& g = *psi.grid;
  const Eigen::VectorXd d1 = fd_first_derivative(psi.values, g.spacing);
  const Eigen::VectorXd d2 = fd_second_derivative(psi.values, g.spacing);
  GridFunction out{psi.grid, Eigen::VectorXd(g.size())};
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const FamilyValues v = fam.values(g.x(i), p);
    const double V = v.W * v.W + (which == Partner::minus ? -1.0 : 1.0) * v.f * v.Wx;
    const double veff = V - 0.5 * v.f * v.fxx - 0.25 * v.fx * v.fx;
    out.values(i) = -v.f * v.f * d2(i) - 2.0 * v.f * v.fx * d1(i) + veff * psi.values(i);
  }
  return out;
}

SelfCheckReport operator_selfcheck(const PotentialFamily& fam, const ParamSet& p, GridPtr grid,
                                   const SelfCheckOptions& options) {
  require_same_family(fam, *grid);
  require_direct(*grid, "operator_selfcheck");
  std::mt19937_64 rng(options.seed);
  const double len = grid->upper - grid->lower;
  const double margin = options.margin * len;
  auto random_bump = [&] {
    const double w = std::uniform_real_distribution<double>(0.1 * len, 0.25 * len)(rng);
    const double lo = grid->lower + margin + w, hi = grid->upper - margin - w;
    const double c = lo < hi ? std::uniform_real_distribution<double>(lo, hi)(rng) : 0.5 * (grid->lower + grid->upper);
    return compact_bump(c, w);
  };

  const TridiagonalOperator hminus = discretize_hamiltonian(fam, p, Partner::minus, grid);
  SelfCheckReport report{0.0, 0.0};
  for (int t = 0; t < options.trials; ++t) {
    const GridFunction phi = sample(fam, random_bump(), grid);
    const GridFunction psi = sample(fam, random_bump(), grid);
    const double lhs = apply_ladder(fam, p, Ladder::plus, phi).dot(psi);
    const double rhs = phi.dot(apply_ladder(fam, p, Ladder::minus, psi));
    report.adjoint_defect = std::max(report.adjoint_defect, std::abs(lhs - rhs) / (phi.norm() * psi.norm()));

    const StateFn chi = random_bump();
    const StateFn factorized = ladder(fam, p, Ladder::plus, ladder(fam, p, Ladder::minus, chi));
    Eigen::VectorXd exact(grid->size());
    for (Eigen::Index i = 0; i < grid->size(); ++i) exact(i) = factorized(Jetd::variable(grid->x(i), 2)).value();
    const Eigen::VectorXd discrete = hminus.apply(sample(fam, chi, grid).values);
    report.factorization_defect =
        std::max(report.factorization_defect, (discrete - exact).norm() / std::max(exact.norm(), 1e-300));
  }
  return report;
}

}  // namespace pdm
