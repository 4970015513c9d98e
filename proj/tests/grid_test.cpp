#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdm/grid.hpp"
#include "pdm/operators.hpp"
#include "pdm/spectra.hpp"

using namespace pdm;
using doctest::Approx;

namespace {

const PotentialFamily& ex1() { return *find_family("ex1"); }
const PotentialFamily& ex2() { return *find_family("ex2"); }

ParamSet ex1_params(double lambda, double alpha) { return {lambda, std::nullopt, alpha, std::nullopt}; }

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("mapped grid covers the u-image of the real line") {
  const ParamSet p = ex1_params(1.0, 0.5);
  const GridPtr g = build_grid(ex1(), p, 1000);
  const double end = std::numbers::pi / (2.0 * std::sqrt(0.5));
  CHECK(g->coordinate == Coordinate::mapped_u);
  CHECK(g->lower == Approx(-end).epsilon(1e-12));
  CHECK(g->upper == Approx(end).epsilon(1e-12));
  CHECK(g->size() == 1000);
  CHECK(g->spacing == Approx(2.0 * end / 1001).epsilon(1e-12));
  for (Eigen::Index i = 0; i < g->size(); i += 97) CHECK(ex1().to_mapped(g->x(i), p) == Approx(g->nodes(i)));
}

TEST_CASE("constant-mass limit gives u = x") {
  const GridPtr g = build_grid(ex1(), ex1_params(1.0, 0.0), 200);
  CHECK((g->nodes - g->x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("strategy defaults and overrides") {
  CHECK(find_family("t1r4")->domain().grid_strategy == GridStrategy::truncated);
  const GridPtr t = build_grid(*find_family("t1r4"), {-3.0, std::nullopt, 2.0, std::nullopt}, 100);
  CHECK(t->coordinate == Coordinate::direct_x);

  GridOptions opt;
  opt.strategy = GridStrategy::truncated;
  const GridPtr d = build_grid(ex1(), ex1_params(1.0, 0.5), 100, opt);
  CHECK(d->coordinate == Coordinate::direct_x);

  GridOptions box;
  box.bounds = std::pair{-2.0, 3.0};
  const GridPtr b = build_grid(ex1(), ex1_params(1.0, 0.5), 99, box);
  CHECK(b->lower == -2.0);
  CHECK(b->upper == 3.0);
  CHECK(b->spacing == Approx(0.05));
}

TEST_CASE("truncation bounds put the ground state below 1e-12 of its peak") {
  const ParamSet p = ex1_params(1.0, 0.5);
  const TruncationBounds tb = truncation_bounds(ex1(), p);
  const double peak = ex1().log_ground_state(0.0, p);
  CHECK(ex1().log_ground_state(tb.upper, p) - peak <= std::log(1e-12) + 1e-9);
  CHECK(ex1().log_ground_state(tb.lower, p) - peak <= std::log(1e-12) + 1e-9);

  // Finite ends are kept.
  const TruncationBounds w = truncation_bounds(ex2(), {2.0, 0.5, 0.5, std::nullopt});
  CHECK(w.lower == Approx(-std::numbers::pi / 2));
  CHECK(w.upper == Approx(std::numbers::pi / 2));
}

TEST_CASE("grid construction rejects bad input") {
  CHECK_THROWS_AS(build_grid(ex1(), ex1_params(1.0, 0.5), 15), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(ex1(), ex1_params(1.0, -0.5), 100), InvalidParams);
  GridOptions box;
  box.bounds = std::pair{-1.0, 2.0};
  CHECK_THROWS_AS(build_grid(ex2(), {2.0, 0.5, 0.5, std::nullopt}, 100, box), std::invalid_argument);
}

TEST_CASE("discretized Hamiltonian is symmetric with nonpositive couplings") {
  for (const char* id : {"ex1", "ex2", "t1r2", "gen2"}) {
    CAPTURE(id);
    const PotentialFamily& f = *find_family(id);
    const ParamSet p = id == std::string("ex1")    ? ex1_params(1.0, 0.1)
                       : id == std::string("ex2")  ? ParamSet{2.0, 0.5, 0.5, std::nullopt}
                       : id == std::string("t1r2") ? ParamSet{3.0, std::nullopt, 0.5, std::nullopt}
                                                   : ParamSet{1.0, 0.5, 0.3, 0.2};
    const TridiagonalOperator op = discretize_hamiltonian(f, p, Partner::minus, build_grid(f, p, 400));
    CHECK(op.diag.allFinite());
    CHECK(op.offdiag.size() == op.diag.size() - 1);
    CHECK(op.offdiag.maxCoeff() <= 0.0);
  }
}

TEST_CASE("constant-mass limit discretizes x^2 - 1") {
  const ParamSet p = ex1_params(1.0, 0.0);
  const GridPtr g = build_grid(ex1(), p, 500);
  const TridiagonalOperator op = discretize_hamiltonian(ex1(), p, Partner::minus, g);
  const double h2 = g->spacing * g->spacing;
  for (Eigen::Index i = 0; i < g->size(); i += 50) CHECK(op.diag(i) == Approx(2.0 / h2 + g->x(i) * g->x(i) - 1.0));
  CHECK(op.offdiag(7) == Approx(-1.0 / h2));
}

TEST_CASE("lowest level of ex1 on a fine mapped grid is zero") {
  const ParamSet p = ex1_params(1.0, 0.1);
  const TridiagonalOperator op = discretize_hamiltonian(ex1(), p, Partner::minus, build_grid(ex1(), p, 4000));
  CHECK(std::abs(numerical_spectrum(op, 1)(0)) < 1e-6);
}

TEST_CASE("tridiagonal apply matches the dense product") {
  const ParamSet p{2.0, 0.5, 0.5, std::nullopt};
  const TridiagonalOperator op = discretize_hamiltonian(ex2(), p, Partner::minus, build_grid(ex2(), p, 64));
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(64, 64);
  dense.diagonal() = op.diag;
  dense.diagonal(1) = op.offdiag;
  dense.diagonal(-1) = op.offdiag;
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(64, -1.0, 2.0).array().sin();
  CHECK((op.apply(v) - dense * v).cwiseAbs().maxCoeff() < 1e-9 * (dense * v).cwiseAbs().maxCoeff());
}

TEST_CASE("finite-difference stencils are exact on quartics") {
  const int n = 40;
  const double h = 0.1;
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, (n - 1) * h);
  auto poly = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t - 0.3 * t * t * t + 0.07 * t * t * t * t; };
  auto d1 = [](double t) { return -2.0 + t - 0.9 * t * t + 0.28 * t * t * t; };
  auto d2 = [](double t) { return 1.0 - 1.8 * t + 0.84 * t * t; };
  Eigen::VectorXd v = x.unaryExpr(poly);
  const Eigen::VectorXd a = fd_first_derivative(v, h), b = fd_second_derivative(v, h);
  for (int i = 0; i < n; ++i) {
    CHECK(a(i) == Approx(d1(x(i))).epsilon(1e-9).scale(10.0));
    CHECK(b(i) == Approx(d2(x(i))).epsilon(1e-8).scale(10.0));
  }
}

TEST_CASE("grid functions: norm, physical values and node counting") {
  const ParamSet p = ex1_params(1.0, 0.5);
  const GridPtr g = build_grid(ex1(), p, 800);
  GridFunction psi = sample(ex1(), ground_state_fn(ex1(), p), g);
  psi.normalize();
  CHECK(psi.norm() == Approx(1.0).epsilon(1e-14));
  // phi = f^{1/2} psi on mapped grids.
  const Eigen::VectorXd phys = psi.physical(ex1());
  for (Eigen::Index i = 0; i < g->size(); i += 101)
    CHECK(phys(i) * std::sqrt(ex1().f(g->x(i), p)) == Approx(psi.values(i)));
  CHECK(psi.node_count() == 0);

  GridFunction odd{g, g->x.array().sin() * psi.values.array()};
  CHECK(odd.node_count() >= 1);
}

TEST_CASE("tail growth separates decaying from growing vectors") {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(200, -5.0, 5.0);
  CHECK(tail_growth((-x.array().square()).exp().matrix()) < 1e-3);
  CHECK(tail_growth(x.array().exp().matrix()) > 1.0);
  CHECK(tail_growth(Eigen::VectorXd::Zero(200)) == 0.0);
  CHECK_THROWS_AS(tail_growth(Eigen::VectorXd::Ones(10)), std::invalid_argument);
}

TEST_CASE("ladder operators annihilate the ground state") {
  const ParamSet p = ex1_params(1.0, 0.5);
  GridOptions box;
  box.bounds = std::pair{-10.0, 10.0};
  const GridPtr g = build_grid(ex1(), p, 2000, box);
  const StateFn psi0 = ground_state_fn(ex1(), p);
  const GridFunction s = sample(ex1(), psi0, g);
  const GridFunction a = apply_ladder(ex1(), p, Ladder::minus, psi0, g);
  CHECK(a.norm() / s.norm() < 1e-10);

  const GridFunction zero{g, Eigen::VectorXd::Zero(g->size())};
  CHECK(apply_ladder(ex1(), p, Ladder::plus, zero).norm() == 0.0);

  // Constant-mass oscillator: A- e^{-x^2/2} = 0 up to the stencil error.
  const ParamSet flat = ex1_params(1.0, 0.0);
  const GridPtr gf = build_grid(ex1(), flat, 2000, box);
  const GridFunction gauss{gf, (-0.5 * gf->x.array().square()).exp().matrix()};
  CHECK(apply_ladder(ex1(), flat, Ladder::minus, gauss).norm() / gauss.norm() < 1e-8);
}

TEST_CASE("ladder operators need a direct grid of the same family") {
  const ParamSet p = ex1_params(1.0, 0.5);
  const GridPtr mapped = build_grid(ex1(), p, 100);
  CHECK_THROWS_AS(apply_ladder(ex1(), p, Ladder::minus, ground_state_fn(ex1(), p), mapped), std::invalid_argument);
  GridOptions box;
  box.bounds = std::pair{-1.0, 1.0};
  const GridPtr other = build_grid(ex2(), {2.0, 0.5, 0.5, std::nullopt}, 100, box);
  CHECK_THROWS_AS(apply_ladder(ex1(), p, Ladder::minus, ground_state_fn(ex1(), p), other), std::invalid_argument);
}

TEST_CASE("A+ and A- are adjoint and factorize H-") {
  GridOptions box;
  box.bounds = std::pair{-10.0, 10.0};
  const ParamSet p = ex1_params(1.0, 0.5);
  const SelfCheckReport r = operator_selfcheck(ex1(), p, build_grid(ex1(), p, 4000, box));
  CHECK(r.adjoint_defect < 1e-6);

  box.bounds = std::pair{-12.0, 12.0};
  const ParamSet flat = ex1_params(1.0, 0.0);
  CHECK(operator_selfcheck(ex1(), flat, build_grid(ex1(), flat, 20000, box)).factorization_defect < 1e-6);

  const ParamSet q{2.0, 0.5, 0.5, std::nullopt};
  box.bounds = std::pair{-1.5, 1.5};
  CHECK(operator_selfcheck(ex2(), q, build_grid(ex2(), q, 4000, box)).adjoint_defect < 1e-5);
}

TEST_CASE("FD Hamiltonian agrees with the exact action on a smooth state") {
  GridOptions box;
  box.bounds = std::pair{-8.0, 8.0};
  const ParamSet p = ex1_params(1.0, 0.3);
  const GridPtr g = build_grid(ex1(), p, 4000, box);
  const StateFn bump = gaussian_bump(0.5, 0.7);
  const GridFunction fd = apply_hamiltonian_fd(ex1(), p, Partner::minus, sample(ex1(), bump, g));
  const GridFunction exact = sample(ex1(), hamiltonian(ex1(), p, Partner::minus, bump), g, 2);
  CHECK((fd.values - exact.values).norm() / exact.values.norm() < 1e-8);
}

}  // TEST_SUITE
