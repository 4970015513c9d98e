#include <doctest.h>

#include <cmath>

#include "pdm/algebra.hpp"

using namespace pdm;
using doctest::Approx;

namespace {

GridPtr lattice_grid(const ParamLattice& lattice, int N = 2000) {
  GridOptions opt;
  opt.bounds = default_lattice_bounds(lattice.family(), lattice.base());
  return build_grid(lattice.family(), lattice.base(), N, opt);
}

ParamLattice ex1_lattice(double lambda, double alpha, int K = 6) {
  return ParamLattice(find_family("ex1"), {lambda, std::nullopt, alpha, std::nullopt}, K);
}

ParamLattice ex2_lattice(int K = 6) { return ParamLattice(find_family("ex2"), {2.0, 0.5, 0.5, std::nullopt}, K); }

}  // namespace

TEST_SUITE("algebra") {

TEST_CASE("lattice is the affine orbit of the parameter step") {
  const ParamLattice l = ex2_lattice();
  CHECK(l.eta().lambda == 1.0);
  CHECK(*l.eta().mu == 0.5);
  CHECK(l.at(3).lambda == 5.0);
  CHECK(*l.at(-2).mu == Approx(-0.5));
  CHECK(l.R(0) == Approx(4.25));
  CHECK(l.invalid_indices().empty());

  const ParamLattice bad(find_family("t1r2"), {1.0, std::nullopt, 0.5, std::nullopt}, 6);
  CHECK(bad.invalid_indices() == std::vector<int>{-6, -5, -4, -3, -2, -1});
  CHECK_THROWS_AS(ParamLattice(find_family("gen2"), {1.0, 0.5, 0.3, 0.2}, 6), std::invalid_argument);
  CHECK_THROWS_AS(ParamLattice(find_family("ex1"), {1.0, std::nullopt, 0.5, std::nullopt}, 0), std::invalid_argument);
}

TEST_CASE("lattice bounds keep finite ends and clip infinite ones") {
  const auto [lo, hi] = default_lattice_bounds(*find_family("ex2"), {2.0, 0.5, 0.5, std::nullopt});
  CHECK(lo == Approx(-M_PI / 2));
  CHECK(hi == Approx(M_PI / 2));
  const auto [a, b] = default_lattice_bounds(*find_family("ex1"), {1.0, std::nullopt, 0.1, std::nullopt});
  CHECK(a == Approx(-10.0));
  CHECK(b == Approx(10.0));
}

TEST_CASE("shifts and scalar multiplications on sampled states") {
  const ParamLattice l = ex1_lattice(1.0, 0.5);
  const GridPtr g = lattice_grid(l, 400);
  const auto states = random_bump_states(*g, 1, 3);
  const LatticeState s = evaluate(states[0].expr(l.K()), g, l.K());

  const LatticeState back = apply_shift(apply_shift(s, Shift::T), Shift::Tdag);
  CHECK(back.window.size() == s.window.size() - 2);
  CHECK(relative_defect(back, s, s) < 1e-15);

  // A k-independent state is invariant under T.
  LatticeExpr flat{[](const Jetd& x, int) { return exp(-x * x); }, {-l.K(), l.K()}, 0};
  const LatticeState f = evaluate(flat, g, l.K());
  CHECK(relative_defect(apply_shift(f, Shift::T), f, f) == 0.0);

  LatticeState zero = s;
  zero.values.setZero();
  CHECK(apply_B(zero, Ladder::plus, l).values.norm() == 0.0);
  CHECK(apply_R(zero, 1, l).values.norm() == 0.0);
}

TEST_CASE("multiplying by R outside validity throws") {
  const ParamLattice l(find_family("t1r2"), {16.0, std::nullopt, 0.5, std::nullopt}, 6);
  const GridPtr g = lattice_grid(l, 200);
  const LatticeState s = evaluate(random_bump_states(*g, 1, 0)[0].expr(6), g, 6);
  CHECK_NOTHROW(apply_R(s, 0, l));
  CHECK_THROWS_AS(apply_R(s, -20, l), InvalidParams);
}

TEST_CASE("commutator of the lattice ladders is R at k - 1") {
  const ParamLattice a = ex1_lattice(1.0, 0.5);
  const CommutatorReport ra = check_commutator_BB(a, lattice_grid(a), random_bump_states(*lattice_grid(a), 4, 0));
  CHECK(ra.scalar_k0 == Approx(1.5).epsilon(1e-14));
  CHECK(*commutator_scalar_closed_form(a.family(), a.base()) == Approx(1.5).epsilon(1e-14));
  CHECK(ra.bb.analytic < 1e-8);
  CHECK(ra.bb.fd < 1e-5);
  CHECK(ra.factorization.analytic < 1e-8);
  CHECK(ra.factorization.fd < 1e-5);

  const ParamLattice b = ex2_lattice();
  const GridPtr gb = lattice_grid(b);
  const CommutatorReport rb = check_commutator_BB(b, gb, random_bump_states(*gb, 4, 0));
  CHECK(rb.scalar_k0 == Approx(2.75).epsilon(1e-14));
  CHECK(*commutator_scalar_closed_form(b.family(), b.base()) == Approx(2.75).epsilon(1e-14));
  CHECK(rb.bb.analytic < 1e-8);
}

TEST_CASE("intertwining relations on ex1") {
  const ParamLattice l = ex1_lattice(1.0, 0.5);
  const GridPtr g = lattice_grid(l);
  const auto states = random_bump_states(*g, 4, 1);
  const IntertwiningReport one = check_intertwining(l, 1, g, states);
  CHECK(one.h_b_plus.analytic < 1e-7);
  CHECK(one.h_b_minus.analytic < 1e-7);
  CHECK(one.r_b_plus < 1e-12);
  CHECK(one.r_b_minus < 1e-12);
  CHECK(one.scalar_sum_k0 == Approx(2.5));

  const IntertwiningReport two = check_intertwining(l, 2, g, states);
  CHECK(two.scalar_sum_k0 == Approx(2.0 * 2.0 * 1.0 + 4.0 * 0.5));
  CHECK(two.h_b_plus.fd < 1e-5);

  const ParamLattice narrow = ex1_lattice(1.0, 0.5, 2);
  CHECK_THROWS_AS(check_intertwining(narrow, 2, lattice_grid(narrow, 200), random_bump_states(*g, 1, 0)),
                  std::invalid_argument);
}

TEST_CASE("exact lattice identities hold to rounding") {
  const ParamLattice l = ex2_lattice();
  const GridPtr g = lattice_grid(l, 500);
  const ExactIdentityReport r = check_exact_identities(l, g, random_bump_states(*g, 3, 2));
  CHECK(r.shift_inverse < 1e-12);
  CHECK(r.shift_conjugation < 1e-12);
  CHECK(r.r_b_plus < 1e-12);
  CHECK(r.r_b_minus < 1e-12);
}

TEST_CASE("ladder commutators with R give the tabulated coefficients") {
  {
    const ParamLattice l = ex1_lattice(1.0, 0.5);
    const GridPtr g = lattice_grid(l);
    const RCommutatorReport r = check_R_commutators(l, g, random_bump_states(*g, 4, 0));
    CHECK(r.c_plus == Approx(1.0).epsilon(1e-10));
    CHECK(r.c_minus == Approx(1.0).epsilon(1e-10));
    CHECK(*r.table_value == Approx(1.0));
    CHECK(r.double_commutator < 1e-10);
    CHECK(r.plus_defect.analytic < 1e-8);
  }
  {
    const ParamLattice l = ex2_lattice();
    const GridPtr g = lattice_grid(l);
    const RCommutatorReport r = check_R_commutators(l, g, random_bump_states(*g, 4, 0));
    CHECK(r.c_plus == Approx(1.5).epsilon(1e-10));
    CHECK(*r.table_value == Approx(1.5));
  }
  {
    const ParamLattice l(find_family("t1r1"), {-9.0, 1.0, 0.5, std::nullopt}, 6);
    const GridPtr g = lattice_grid(l, 1000);
    const RCommutatorReport r = check_R_commutators(l, g, random_bump_states(*g, 3, 0));
    CHECK(r.c_plus == Approx(4.0).epsilon(1e-9));
    CHECK(*r.table_value == Approx(4.0));
  }
  {
    // The row-4 entry prints (alpha - 1); the measured coefficient is the
    // remainder difference 2(alpha - 1).
    const ParamLattice l(find_family("t1r4"), {-9.0, std::nullopt, 2.0, std::nullopt}, 6);
    const GridPtr g = lattice_grid(l, 1000);
    const RCommutatorReport r = check_R_commutators(l, g, random_bump_states(*g, 3, 0));
    CHECK(r.expected == Approx(2.0));
    CHECK(r.c_plus == Approx(2.0).epsilon(1e-8));
    CHECK(*r.table_value == Approx(1.0));
  }
}

TEST_CASE("ladder states are eigenstates with the summed remainders") {
  const ParamLattice a = ex1_lattice(1.0, 0.1);
  const LadderReport ra = check_ladder_eigenstates(a, 3, lattice_grid(a));
  CHECK(ra.annihilation < 1e-8);
  REQUIRE(ra.levels.size() == 4);
  CHECK(ra.levels[0].rayleigh == Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(ra.levels[1].expected == Approx(2.1).epsilon(1e-14));
  CHECK(ra.levels[1].rayleigh == Approx(2.1).epsilon(1e-8));
  for (const LadderLevel& lv : ra.levels) {
    CHECK(lv.residual < 1e-6);
    CHECK(lv.tail_growth < 1.0);
  }

  const ParamLattice b = ex2_lattice();
  const LadderReport rb = check_ladder_eigenstates(b, 2, lattice_grid(b));
  CHECK(rb.levels[2].expected == Approx(10.0).epsilon(1e-14));
  CHECK(rb.levels[2].rayleigh == Approx(10.0).epsilon(1e-8));
}

TEST_CASE("ground-state lattice needs the unbroken regime") {
  const ParamLattice broken(find_family("t1r1"), {9.0, 1.0, 0.5, std::nullopt}, 3);
  CHECK_THROWS_AS(ground_state_lattice(broken), RegimeError);
}

TEST_CASE("bump states are centred and narrow") {
  const ParamLattice l = ex1_lattice(1.0, 0.5);
  const GridPtr g = lattice_grid(l, 200);
  const auto s = random_bump_states(*g, 50, 4);
  const double L = g->upper - g->lower, mid = 0.5 * (g->upper + g->lower);
  for (const BumpState& b : s) {
    CHECK(std::abs(b.center - mid) <= 0.1 * L);
    CHECK(b.width >= 0.032 * L);
    CHECK(b.width <= 0.048 * L);
  }
  // Same seed, same states.
  CHECK(random_bump_states(*g, 3, 9)[2].center == random_bump_states(*g, 3, 9)[2].center);
}

}  // TEST_SUITE
