#include <doctest.h>

#include <cmath>

#include "pdm/jet.hpp"
#include "pdm/nelder_mead.hpp"
#include "pdm/quadrature.hpp"

using namespace pdm;
using doctest::Approx;

TEST_SUITE("jet") {

TEST_CASE("variable carries value and unit slope") {
  const Jetd x = Jetd::variable(0.7, 3);
  CHECK(x.order() == 3);
  CHECK(x.value() == 0.7);
  CHECK(x.derivative_value(1) == 1.0);
  CHECK(x.derivative_value(2) == 0.0);
}

TEST_CASE("derivatives of elementary compositions match closed forms") {
  const double x0 = 0.4;
  const Jetd x = Jetd::variable(x0, 4);

  const Jetd e = exp(sin(x));
  const double s = std::sin(x0), c = std::cos(x0), es = std::exp(s);
  CHECK(e.derivative_value(1) == Approx(c * es).epsilon(1e-14));
  CHECK(e.derivative_value(2) == Approx((c * c - s) * es).epsilon(1e-14));

  const Jetd p = pow(1.0 + 0.3 * x * x, -2.5);
  const double f = 1.0 + 0.3 * x0 * x0;
  CHECK(p.derivative_value(1) == Approx(-2.5 * std::pow(f, -3.5) * 0.6 * x0).epsilon(1e-14));

  const Jetd t = tan(x);
  const double sec2 = 1.0 / (c * c);
  CHECK(t.derivative_value(1) == Approx(sec2).epsilon(1e-14));
  CHECK(t.derivative_value(2) == Approx(2.0 * sec2 * std::tan(x0)).epsilon(1e-13));

  const Jetd l = log(x);
  CHECK(l.derivative_value(3) == Approx(2.0 / (x0 * x0 * x0)).epsilon(1e-13));

  const Jetd h = sinh(x) / cosh(x);
  CHECK(h.derivative_value(1) == Approx(1.0 / std::pow(std::cosh(x0), 2)).epsilon(1e-14));
}

TEST_CASE("derivatives agree with central finite differences") {
  auto fn = [](const Jetd& x) { return sqrt(1.0 + x * x) * cos(2.0 * x) / (2.0 + sinh(x)); };
  auto fd = [](double x) { return std::sqrt(1.0 + x * x) * std::cos(2.0 * x) / (2.0 + std::sinh(x)); };
  const double x0 = 0.3, h = 1e-4;
  const Jetd j = fn(Jetd::variable(x0, 2));
  CHECK(j.derivative_value(1) == Approx((fd(x0 + h) - fd(x0 - h)) / (2 * h)).epsilon(1e-7));
  CHECK(j.derivative_value(2) == Approx((fd(x0 + h) - 2 * fd(x0) + fd(x0 - h)) / (h * h)).epsilon(1e-5));
}

TEST_CASE("derivative and integral are inverse on truncated series") {
  const Jetd x = Jetd::variable(0.2, 5);
  const Jetd g = exp(x) * x;
  const Jetd back = g.derivative().integral(g.value());
  for (int k = 0; k < 5; ++k) CHECK(back[k] == Approx(g[k]).epsilon(1e-14));
}

}  // TEST_SUITE

TEST_SUITE("jet") {

TEST_CASE("adaptive Simpson integrates smooth functions to tolerance") {
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) == Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 5.0) ==
        Approx(std::atan(5.0)).epsilon(1e-12));
  // Reversed limits flip the sign.
  CHECK(adaptive_simpson([](double x) { return x * x; }, 1.0, 0.0) == Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(adaptive_simpson([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("simplex finds the minimum of a shifted quadratic") {
  auto fn = [](const Eigen::VectorXd& v) { return std::pow(v(0) - 1.5, 2) + 3.0 * std::pow(v(1) + 0.25, 2); };
  SimplexOptions opt;
  opt.max_iterations = 2000;
  opt.x_tolerance = 1e-12;
  const auto r = nelder_mead<double>(fn, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.5, 0.5), opt);
  CHECK(r.x(0) == Approx(1.5).epsilon(1e-8));
  CHECK(r.x(1) == Approx(-0.25).epsilon(1e-8));
  CHECK(r.fx < 1e-15);
}

TEST_CASE("simplex stops at the target value") {
  auto fn = [](const Eigen::VectorXd& v) { return v.squaredNorm(); };
  SimplexOptions opt;
  opt.f_target = 1e-2;
  const auto r = nelder_mead<double>(fn, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.3, 0.3), opt);
  CHECK(r.fx <= 1e-2);
  CHECK(r.iterations < opt.max_iterations);
}

}  // TEST_SUITE
