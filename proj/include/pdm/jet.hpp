#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pdm {

/// Truncated Taylor series a_0 + a_1 e + ... + a_K e^K about a point, with
/// a_k = f^(k)(x0) / k!.  Arithmetic propagates all coefficients exactly up to
/// order K, so composing closed forms with jets yields derivatives to roundoff.
///
/// Differentiation lowers the order by one; binary operations truncate to the
/// lower of the two orders.
template <typename Scalar>
class Jet {
 public:
  static constexpr int kMaxOrder = 15;
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxOrder + 1, 1>;

  Jet() : c_(Coeffs::Zero(1)) {}

  /// Constant of the given order.
  Jet(Scalar value, int order) : c_(Coeffs::Zero(order + 1)) {
    check_order(order);
    c_(0) = value;
  }

  /// The independent variable x0 + e.
  static Jet variable(Scalar x0, int order) {
    Jet j(x0, order);
    if (order >= 1) j.c_(1) = Scalar(1);
    return j;
  }

  static Jet from_coeffs(const Coeffs& c) {
    Jet j;
    j.c_ = c;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Scalar value() const { return c_(0); }
  Scalar operator[](int k) const { return c_(k); }
  Scalar& operator[](int k) { return c_(k); }
  const Coeffs& coeffs() const { return c_; }

  /// k-th derivative at the expansion point.
  Scalar derivative_value(int k) const {
    if (k > order()) throw std::out_of_range("Jet: derivative beyond order");
    Scalar fact = 1;
    for (int i = 2; i <= k; ++i) fact *= Scalar(i);
    return c_(k) * fact;
  }

  /// d/dx of the series, one order lower.
  Jet derivative() const {
    if (order() < 1) throw std::out_of_range("Jet: cannot differentiate an order-0 jet");
    Jet d;
    d.c_.resize(order());
    for (int k = 0; k < order(); ++k) d.c_(k) = Scalar(k + 1) * c_(k + 1);
    return d;
  }

  /// Antiderivative with the given constant term; the order is kept, so the
  /// top coefficient of the input is dropped.
  Jet integral(Scalar constant) const {
    Jet r(constant, order());
    for (int k = 1; k <= order(); ++k) r.c_(k) = c_(k - 1) / Scalar(k);
    return r;
  }

  Jet truncated(int order) const {
    Jet r;
    r.c_ = c_.head(std::min(order, this->order()) + 1);
    return r;
  }

  Jet operator-() const { return from_coeffs(-c_); }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
  Jet& operator+=(Scalar s) { c_(0) += s; return *this; }
  Jet& operator-=(Scalar s) { c_(0) -= s; return *this; }
  Jet& operator*=(Scalar s) { c_ *= s; return *this; }
  Jet& operator/=(Scalar s) { c_ /= s; return *this; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order()) + 1;
    return from_coeffs(a.c_.head(n) + b.c_.head(n));
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order()) + 1;
    return from_coeffs(a.c_.head(n) - b.c_.head(n));
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order()) + 1;
    Coeffs r = Coeffs::Zero(n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j <= k; ++j) r(k) += a.c_(j) * b.c_(k - j);
    return from_coeffs(r);
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order()) + 1;
    Coeffs r = Coeffs::Zero(n);
    for (int k = 0; k < n; ++k) {
      Scalar s = a.c_(k);
      for (int j = 1; j <= k; ++j) s -= b.c_(j) * r(k - j);
      r(k) = s / b.c_(0);
    }
    return from_coeffs(r);
  }

  friend Jet operator+(Jet a, Scalar s) { a.c_(0) += s; return a; }
  friend Jet operator+(Scalar s, Jet a) { a.c_(0) += s; return a; }
  friend Jet operator-(Jet a, Scalar s) { a.c_(0) -= s; return a; }
  friend Jet operator-(Scalar s, const Jet& a) { Jet r = -a; r.c_(0) += s; return r; }
  friend Jet operator*(Jet a, Scalar s) { a.c_ *= s; return a; }
  friend Jet operator*(Scalar s, Jet a) { a.c_ *= s; return a; }
  friend Jet operator/(Jet a, Scalar s) { a.c_ /= s; return a; }
  friend Jet operator/(Scalar s, const Jet& a) { return Jet(s, a.order()) / a; }

  friend Jet exp(const Jet& a) {
    const int n = a.order() + 1;
    Coeffs r = Coeffs::Zero(n);
    r(0) = std::exp(a.c_(0));
    for (int k = 1; k < n; ++k) {
      Scalar s = 0;
      for (int j = 1; j <= k; ++j) s += Scalar(j) * a.c_(j) * r(k - j);
      r(k) = s / Scalar(k);
    }
    return from_coeffs(r);
  }

  friend Jet log(const Jet& a) {
    const int n = a.order() + 1;
    Coeffs r = Coeffs::Zero(n);
    r(0) = std::log(a.c_(0));
    for (int k = 1; k < n; ++k) {
      Scalar s = a.c_(k);
      for (int j = 1; j < k; ++j) s -= Scalar(j) * r(j) * a.c_(k - j) / Scalar(k);
      r(k) = s / a.c_(0);
    }
    return from_coeffs(r);
  }

  /// a^p for real p; requires a_0 > 0 unless p is a non-negative integer.
  friend Jet pow(const Jet& a, Scalar p) {
    const int n = a.order() + 1;
    Coeffs r = Coeffs::Zero(n);
    r(0) = std::pow(a.c_(0), p);
    for (int k = 1; k < n; ++k) {
      Scalar s = 0;
      for (int j = 1; j <= k; ++j) s += ((p + Scalar(1)) * Scalar(j) - Scalar(k)) * a.c_(j) * r(k - j);
      r(k) = s / (Scalar(k) * a.c_(0));
    }
    return from_coeffs(r);
  }

  friend Jet sqrt(const Jet& a) { return pow(a, Scalar(0.5)); }

  friend void sincos(const Jet& a, Jet& s, Jet& c) {
    const int n = a.order() + 1;
    Coeffs rs = Coeffs::Zero(n), rc = Coeffs::Zero(n);
    rs(0) = std::sin(a.c_(0));
    rc(0) = std::cos(a.c_(0));
    for (int k = 1; k < n; ++k) {
      Scalar ss = 0, cc = 0;
      for (int j = 1; j <= k; ++j) {
        ss += Scalar(j) * a.c_(j) * rc(k - j);
        cc -= Scalar(j) * a.c_(j) * rs(k - j);
      }
      rs(k) = ss / Scalar(k);
      rc(k) = cc / Scalar(k);
    }
    s = from_coeffs(rs);
    c = from_coeffs(rc);
  }
  friend Jet sin(const Jet& a) { Jet s, c; sincos(a, s, c); return s; }
  friend Jet cos(const Jet& a) { Jet s, c; sincos(a, s, c); return c; }
  friend Jet tan(const Jet& a) { Jet s, c; sincos(a, s, c); return s / c; }

  friend void sinhcosh(const Jet& a, Jet& s, Jet& c) {
    const int n = a.order() + 1;
    Coeffs rs = Coeffs::Zero(n), rc = Coeffs::Zero(n);
    rs(0) = std::sinh(a.c_(0));
    rc(0) = std::cosh(a.c_(0));
    for (int k = 1; k < n; ++k) {
      Scalar ss = 0, cc = 0;
      for (int j = 1; j <= k; ++j) {
        ss += Scalar(j) * a.c_(j) * rc(k - j);
        cc += Scalar(j) * a.c_(j) * rs(k - j);
      }
      rs(k) = ss / Scalar(k);
      rc(k) = cc / Scalar(k);
    }
    s = from_coeffs(rs);
    c = from_coeffs(rc);
  }
  friend Jet sinh(const Jet& a) { Jet s, c; sinhcosh(a, s, c); return s; }
  friend Jet cosh(const Jet& a) { Jet s, c; sinhcosh(a, s, c); return c; }

 private:
  static void check_order(int order) {
    if (order < 0 || order > kMaxOrder) throw std::out_of_range("Jet: order out of range");
  }

  Coeffs c_;
};

using Jetd = Jet<double>;

// Scalar overloads so closed forms can be written once as templates over
// double and Jet<double>.
inline double sq(double v) { return v * v; }
template <typename S>
Jet<S> sq(const Jet<S>& v) { return v * v; }

}  // namespace pdm
