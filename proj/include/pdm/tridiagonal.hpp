#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdm {

/// Lowest eigenpairs of a real symmetric tridiagonal matrix given by its
/// diagonal `d` (size n) and off-diagonal `e` (size n-1).
template <typename Scalar>
struct TridiagonalEigen {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Vector values;
  Matrix vectors;  ///< unit Euclidean columns; empty unless requested
};

namespace detail {

template <typename Scalar>
Scalar pivot_floor(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& e) {
  const Scalar emax = e.size() ? e.cwiseAbs2().maxCoeff() : Scalar(0);
  return std::max(std::numeric_limits<Scalar>::min() * std::max(emax, Scalar(1)),
                  std::numeric_limits<Scalar>::min());
}

}  // namespace detail

/// Number of eigenvalues strictly below x (Sturm sequence count).
template <typename Scalar>
int sturm_count(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& e,
                Scalar x, Scalar pivmin) {
  int count = 0;
  Scalar q = d(0) - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    q = d(i) - x - e(i - 1) * e(i - 1) / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

/// The m lowest eigenvalues by bisection on the Sturm count, each bisected
/// until the bracket stops shrinking in floating point.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lowest_eigenvalues(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d,
                                                            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& e, int m) {
  const Eigen::Index n = d.size();
  if (n < 1 || e.size() != n - 1) throw std::invalid_argument("tridiagonal: inconsistent diagonal sizes");
  if (m < 1 || m > n) throw std::invalid_argument("tridiagonal: requested eigenvalue count out of range");

  // Gershgorin interval.
  Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar r = (i > 0 ? std::abs(e(i - 1)) : Scalar(0)) + (i + 1 < n ? std::abs(e(i)) : Scalar(0));
    lo = std::min(lo, d(i) - r);
    hi = std::max(hi, d(i) + r);
  }
  const Scalar width = std::max(hi - lo, Scalar(1)) * std::numeric_limits<Scalar>::epsilon() * n;
  lo -= width;
  hi += width;
  const Scalar pivmin = detail::pivot_floor(e);

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(m);
  Scalar start = lo;
  for (int k = 0; k < m; ++k) {
    // Bracket [a, b] with count(a) <= k < count(b).
    Scalar a = start, b = hi;
    for (;;) {
      const Scalar mid = a + (b - a) / 2;
      if (mid <= a || mid >= b) break;
      if (sturm_count(d, e, mid, pivmin) > k)
        b = mid;
      else
        a = mid;
    }
    out(k) = a + (b - a) / 2;
    start = a;
  }
  return out;
}

/// Pivoted LU of a tridiagonal matrix (row interchanges, as in LAPACK's
/// gttrf), used to solve shifted systems during inverse iteration.
template <typename Scalar>
class TridiagonalLU {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalLU(const Vector& d, const Vector& e, Scalar shift) {
    const Eigen::Index n = d.size();
    dl_ = e;
    du_ = e;
    d_ = d.array() - shift;
    du2_ = Vector::Zero(std::max<Eigen::Index>(n - 2, 0));
    swap_ = Eigen::Matrix<bool, Eigen::Dynamic, 1>::Constant(n, false);
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::max(d.cwiseAbs().maxCoeff(), Scalar(1));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(d_(i)) >= std::abs(dl_(i))) {
        if (d_(i) == 0) d_(i) = tiny;
        const Scalar l = dl_(i) / d_(i);
        dl_(i) = l;
        d_(i + 1) -= l * du_(i);
      } else {
        const Scalar l = d_(i) / dl_(i);
        d_(i) = dl_(i);
        dl_(i) = l;
        const Scalar t = du_(i);
        du_(i) = d_(i + 1);
        d_(i + 1) = t - l * d_(i + 1);
        if (i + 2 < n) {
          du2_(i) = du_(i + 1);
          du_(i + 1) = -l * du_(i + 1);
        }
        swap_(i) = true;
      }
    }
    if (d_(n - 1) == 0) d_(n - 1) = tiny;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(d_(i)) < tiny) d_(i) = d_(i) < 0 ? -tiny : tiny;
  }

  Vector solve(Vector b) const {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (swap_(i)) std::swap(b(i), b(i + 1));
      b(i + 1) -= dl_(i) * b(i);
    }
    b(n - 1) /= d_(n - 1);
    if (n > 1) b(n - 2) = (b(n - 2) - du_(n - 2) * b(n - 1)) / d_(n - 2);
    for (Eigen::Index i = n - 3; i >= 0; --i) b(i) = (b(i) - du_(i) * b(i + 1) - du2_(i) * b(i + 2)) / d_(i);
    return b;
  }

 private:
  Vector d_, dl_, du_, du2_;
  Eigen::Matrix<bool, Eigen::Dynamic, 1> swap_;
};

/// Lowest m eigenpairs: bisection for the values, then three steps of inverse
/// iteration per vector with re-orthogonalization against earlier vectors.
/// Each vector is normalized and signed so its first significant entry is
/// positive.
template <typename Scalar>
TridiagonalEigen<Scalar> lowest_eigenpairs(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d,
                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& e, int m,
                                           bool with_vectors = true) {
  TridiagonalEigen<Scalar> out;
  out.values = lowest_eigenvalues(d, e, m);
  if (!with_vectors) return out;

  const Eigen::Index n = d.size();
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  out.vectors.resize(n, m);
  for (int k = 0; k < m; ++k) {
    const TridiagonalLU<Scalar> lu(d, e, out.values(k));
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Scalar(1) + Scalar(0.1) * std::sin(Scalar(0.7) * i + k);
    for (int it = 0; it < 3; ++it) {
      v = lu.solve(v);
      for (int j = 0; j < k; ++j) v -= out.vectors.col(j).dot(v) * out.vectors.col(j);
      const Scalar nv = v.norm();
      if (!(nv > 0) || !std::isfinite(nv)) throw std::runtime_error("inverse iteration broke down");
      v /= nv;
    }
    const Scalar cut = Scalar(1e-3) * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > cut) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    out.vectors.col(k) = v;
  }
  return out;
}

}  // namespace pdm
