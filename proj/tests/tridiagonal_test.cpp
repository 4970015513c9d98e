#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "pdm/grid.hpp"
#include "pdm/spectra.hpp"
#include "pdm/tridiagonal.hpp"

using namespace pdm;
using doctest::Approx;

namespace {

Eigen::MatrixXd dense(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d.size(), d.size());
  a.diagonal() = d;
  a.diagonal(1) = e;
  a.diagonal(-1) = e;
  return a;
}

}  // namespace

TEST_SUITE("tridiagonal") {

TEST_CASE("Sturm count brackets every eigenvalue") {
  Eigen::VectorXd d(4), e(3);
  d << 2, 2, 2, 2;
  e << -1, -1, -1;
  // Eigenvalues 2 - 2 cos(k pi / 5).
  CHECK(sturm_count<double>(d, e, 0.0, 1e-300) == 0);
  CHECK(sturm_count<double>(d, e, 1.5, 1e-300) == 2);
  CHECK(sturm_count<double>(d, e, 5.0, 1e-300) == 4);
}

TEST_CASE("bisection matches a dense symmetric eigensolver on random matrices") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 60 + 10 * trial;
    Eigen::VectorXd d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d(i) = g(rng);
    for (int i = 0; i < n - 1; ++i) e(i) = g(rng);
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(d, e)).eigenvalues();
    const Eigen::VectorXd got = lowest_eigenvalues<double>(d, e, 12);
    for (int k = 0; k < 12; ++k) CHECK(got(k) == Approx(ref(k)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("diagonal operator returns its entries") {
  const Eigen::VectorXd d = Eigen::VectorXd::Constant(40, 3.25);
  const Eigen::VectorXd e = Eigen::VectorXd::Zero(39);
  const Eigen::VectorXd v = lowest_eigenvalues<double>(d, e, 10);
  for (int k = 0; k < 10; ++k) CHECK(v(k) == Approx(3.25).epsilon(1e-14));
}

TEST_CASE("inverse iteration gives orthonormal eigenvectors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 120;
  Eigen::VectorXd d(n), e(n - 1);
  for (int i = 0; i < n; ++i) d(i) = 2.0 + 0.01 * i * i / n + u(rng);
  for (int i = 0; i < n - 1; ++i) e(i) = -1.0;
  const auto eig = lowest_eigenpairs<double>(d, e, 6);
  const Eigen::MatrixXd a = dense(d, e);
  const Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  for (int k = 0; k < 6; ++k) {
    const Eigen::VectorXd r = a * eig.vectors.col(k) - eig.values(k) * eig.vectors.col(k);
    CHECK(r.norm() < 1e-9);
  }
}

TEST_CASE("pivoted LU solves shifted systems") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 50;
  Eigen::VectorXd d(n), e(n - 1), b(n);
  for (int i = 0; i < n; ++i) d(i) = 0.1 * u(rng), b(i) = u(rng);
  for (int i = 0; i < n - 1; ++i) e(i) = 1.0 + u(rng);
  const double shift = 0.37;
  const TridiagonalLU<double> lu(d, e, shift);
  const Eigen::VectorXd x = lu.solve(b);
  const Eigen::MatrixXd a = dense(d, e) - shift * Eigen::MatrixXd::Identity(n, n);
  CHECK((a * x - b).norm() < 1e-10 * b.norm() * (1.0 + x.norm()));
}

TEST_CASE("bad requests are rejected") {
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(8), e = Eigen::VectorXd::Zero(7);
  CHECK_THROWS_AS(lowest_eigenvalues<double>(d, e, 0), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenvalues<double>(d, e, 9), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenvalues<double>(d, Eigen::VectorXd::Zero(3), 1), std::invalid_argument);
}

TEST_CASE("oscillator levels converge at second order") {
  const PotentialFamily& ex1 = *find_family("ex1");
  const ParamSet p{1.0, std::nullopt, 0.0, std::nullopt};
  GridOptions box;
  box.bounds = std::pair{-10.0, 10.0};
  const TridiagonalOperator op = discretize_hamiltonian(ex1, p, Partner::minus, build_grid(ex1, p, 2000, box));
  const Eigen::VectorXd v = numerical_spectrum(op, 3);
  CHECK(v(0) == Approx(0.0).epsilon(1e-4).scale(1.0));
  CHECK(v(1) == Approx(2.0).epsilon(1e-4));
  CHECK(v(2) == Approx(4.0).epsilon(1e-4));
  CHECK(numerical_spectrum(op, 500).size() == 500);
  CHECK_THROWS_AS(numerical_spectrum(op, 501), std::invalid_argument);
  CHECK_THROWS_AS(numerical_spectrum(op, 0), std::invalid_argument);
}

}  // TEST_SUITE
