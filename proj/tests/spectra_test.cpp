#include <doctest.h>

#include <cmath>
#include <random>

#include "pdm/operators.hpp"
#include "pdm/spectra.hpp"

using namespace pdm;
using doctest::Approx;

namespace {

const PotentialFamily& fam(std::string_view id) { return *find_family(id); }

const ParamSet kEx1{1.0, std::nullopt, 0.1, std::nullopt};
const ParamSet kEx2{2.0, 0.5, 0.5, std::nullopt};

std::vector<double> energies(const SpectrumReport& r) {
  std::vector<double> out;
  for (const auto& lv : r.levels) out.push_back(lv.E_algebraic);
  return out;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("algebraic levels of the worked examples") {
  const auto a = energies(algebraic_spectrum(fam("ex1"), kEx1, 3));
  REQUIRE(a.size() == 4);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == Approx(2.1).epsilon(1e-15));
  CHECK(a[2] == Approx(4.4).epsilon(1e-15));
  CHECK(a[3] == Approx(6.9).epsilon(1e-15));

  const auto b = energies(algebraic_spectrum(fam("ex2"), kEx2, 2));
  CHECK(b[1] == Approx(4.25).epsilon(1e-15));
  CHECK(b[2] == Approx(10.0).epsilon(1e-15));

  const auto c = energies(algebraic_spectrum(fam("t1r2"), {1.0, std::nullopt, 0.5, std::nullopt}, 2));
  CHECK(c[1] == Approx(3.5).epsilon(1e-15));
  CHECK(c[2] == Approx(10.0).epsilon(1e-15));
}

TEST_CASE("summation reproduces the closed forms on random draws") {
  std::mt19937_64 rng(1);
  for (const char* id : {"ex1", "ex2"}) {
    for (int i = 0; i < 100; ++i) {
      const ParamSet p = fam(id).sample(rng);
      const SpectrumReport r = algebraic_spectrum(fam(id), p, 6);
      for (const SpectrumLevel& lv : r.levels) {
        CAPTURE(id);
        CAPTURE(lv.n);
        CHECK(lv.E_algebraic == Approx(*lv.E_closed_form).epsilon(1e-14).scale(1.0));
      }
    }
  }
}

TEST_CASE("truncation when the increment is not positive") {
  const SpectrumReport r = algebraic_spectrum(fam("t1r4"), {-2.0, std::nullopt, 0.5, std::nullopt}, 1);
  CHECK(r.truncation == Truncation::remainder_nonpositive);
  CHECK(*r.truncated_at == 1);
  CHECK(r.levels.size() == 1);
  CHECK(to_string(r.truncation) == "remainder-nonpositive");
  CHECK(algebraic_spectrum(fam("ex1"), kEx1, 5).truncation == Truncation::none);
}

TEST_CASE("broken or invalid parameters are rejected") {
  CHECK_THROWS_AS(algebraic_spectrum(fam("t1r1"), {1.0, 0.5, 0.5, std::nullopt}, 2), RegimeError);
  CHECK_THROWS_AS(algebraic_spectrum(fam("ex2"), {2.0, 0.5, 1.5, std::nullopt}, 2), InvalidParams);
  CHECK_THROWS_AS(algebraic_spectrum(fam("ex1"), kEx1, -1), std::invalid_argument);
}

TEST_CASE("ground states are annihilated, normalized and nodeless") {
  for (const char* id : {"ex1", "ex2", "t1r2", "t1r3"}) {
    CAPTURE(id);
    const ParamSet p = id == std::string("ex1")    ? ParamSet{1.0, std::nullopt, 0.5, std::nullopt}
                       : id == std::string("ex2")  ? kEx2
                       : id == std::string("t1r2") ? ParamSet{3.0, std::nullopt, 0.5, std::nullopt}
                                                   : ParamSet{-2.0, std::nullopt, 0.0, 0.5};
    CHECK_FALSE(normalizability_violation(fam(id), p));
    const GridPtr g = build_grid(fam(id), p, 2000);
    const GridFunction psi = ground_state(fam(id), p, g);
    CHECK(psi.norm() == Approx(1.0).epsilon(1e-13));
    CHECK(psi.node_count() == 0);
    const StateFn s = ground_state_fn(fam(id), p);
    const double res = sample(fam(id), ladder(fam(id), p, Ladder::minus, s), g, 1).norm() / sample(fam(id), s, g).norm();
    CHECK(res < 1e-8);
  }
}

TEST_CASE("constant-mass ground state is the Gaussian") {
  const ParamSet p{1.0, std::nullopt, 0.0, std::nullopt};
  const GridPtr g = build_grid(fam("ex1"), p, 1000);
  const GridFunction psi = ground_state(fam("ex1"), p, g);
  GridFunction gauss{g, (-0.5 * g->x.array().square()).exp().matrix()};
  gauss.normalize();
  CHECK((psi.values - gauss.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chain-built excited states of ex1") {
  const GridPtr g = build_grid(fam("ex1"), kEx1, 4000);
  const ExcitedState s1 = excited_state(fam("ex1"), kEx1, 1, g);
  CHECK(s1.residual < 1e-6);
  CHECK(s1.expectation == Approx(2.1).epsilon(1e-4));
  CHECK(s1.energy == Approx(2.1));

  const ExcitedState s0 = excited_state(fam("ex1"), kEx1, 0, g);
  const GridFunction gs = ground_state(fam("ex1"), kEx1, g);
  CHECK((s0.psi.values - gs.values).cwiseAbs().maxCoeff() < 1e-12);

  std::vector<GridFunction> chain;
  for (int n = 0; n <= 3; ++n) {
    const ExcitedState s = excited_state(fam("ex1"), kEx1, n, g);
    CHECK(s.nodes == n);
    CHECK(s.tail_growth < 1.0);
    chain.push_back(s.psi);
  }
  for (int m = 0; m <= 3; ++m)
    for (int n = m + 1; n <= 3; ++n) CHECK(std::abs(chain[m].dot(chain[n])) < 1e-6);

  CHECK_THROWS_AS(excited_state(fam("t1r4"), {-2.0, std::nullopt, 0.5, std::nullopt}, 1,
                                build_grid(fam("t1r4"), {-2.0, std::nullopt, 0.5, std::nullopt}, 100)),
                  std::invalid_argument);
}

TEST_CASE("chain states agree with eigensolver vectors") {
  for (const auto& [id, p] : {std::pair{"ex1", kEx1}, std::pair{"ex2", kEx2}}) {
    CAPTURE(id);
    const GridPtr g = build_grid(fam(id), p, 4000);
    const auto vecs = numerical_states(discretize_hamiltonian(fam(id), p, Partner::minus, g), 4);
    for (int n = 0; n <= 3; ++n) CHECK(std::abs(excited_state(fam(id), p, n, g).psi.dot(vecs[n])) > 0.999);
  }
}

TEST_CASE("Richardson step removes an exact h^2 error") {
  const double E = 3.0, c = 0.7;
  CHECK(richardson(0.1, E + c * 0.01, 0.05, E + c * 0.0025) == Approx(E).epsilon(1e-14));
}

TEST_CASE("numerical levels match the algebraic ones") {
  const SpectrumReport a = compare_spectra(fam("ex1"), kEx1, 5);
  CHECK(a.pass);
  CHECK(a.N_coarse == 2000);
  CHECK(a.N_fine == 4000);
  CHECK(a.extrapolation == "richardson-h2");
  CHECK(a.coordinate == Coordinate::mapped_u);
  for (const SpectrumLevel& lv : a.levels) CHECK(lv.rel_err <= 1e-4);

  const SpectrumReport b = compare_spectra(fam("ex2"), kEx2, 5);
  CHECK(b.pass);
}

TEST_CASE("constant-mass degeneration") {
  const ParamSet p{1.0, std::nullopt, 1e-12, std::nullopt};
  const SpectrumReport r = compare_spectra(fam("ex1"), p, 3);
  for (const SpectrumLevel& lv : r.levels) CHECK(std::abs(*lv.E_numeric - 2.0 * lv.n) < 1e-6);
}

TEST_CASE("unsupported numerics are refused") {
  CHECK(fam("t1r4").numerics_unsupported({-3.0, std::nullopt, 2.0, std::nullopt}));
  CHECK_THROWS_AS(compare_spectra(fam("t1r4"), {-3.0, std::nullopt, 2.0, std::nullopt}, 2), std::invalid_argument);
}

TEST_CASE("observed convergence order is two") {
  const Eigen::VectorXd order = convergence_order(fam("ex1"), kEx1, 3, 500);
  for (Eigen::Index k = 1; k < order.size(); ++k) CHECK(order(k) == Approx(2.0).epsilon(0.05));
}

}  // TEST_SUITE
