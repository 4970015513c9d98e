#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <vector>

namespace pdm {

struct SimplexOptions {
  int max_iterations = 500;
  double f_target = 0.0;      ///< stop once the best value is at or below this
  double x_tolerance = 0.0;   ///< stop once the simplex diameter is below this
};

template <typename Scalar>
struct SimplexResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar fx;
  int iterations;
};

/// Nelder-Mead downhill simplex (standard coefficients 1, 2, 1/2, 1/2).
/// `steps` gives the initial edge length along each coordinate.
template <typename Scalar, typename Fn>
SimplexResult<Scalar> nelder_mead(Fn&& fn, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& steps,
                                  const SimplexOptions& options = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = x0.size();
  std::vector<Vector> pts(n + 1, x0);
  std::vector<Scalar> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += steps(i);
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = fn(pts[i]);

  std::vector<Eigen::Index> order(n + 1);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const Eigen::Index best = order.front(), worst = order.back(), second = order[n - 1];
    if (vals[best] <= options.f_target) break;
    Scalar diameter = 0;
    for (Eigen::Index i = 0; i <= n; ++i) diameter = std::max(diameter, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (diameter <= options.x_tolerance) break;

    Vector centroid = Vector::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= Scalar(n);

    const Vector reflected = centroid + (centroid - pts[worst]);
    const Scalar fr = fn(reflected);
    if (fr < vals[best]) {
      const Vector expanded = centroid + Scalar(2) * (centroid - pts[worst]);
      const Scalar fe = fn(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Vector contracted = outside ? Vector(centroid + Scalar(0.5) * (reflected - centroid))
                                      : Vector(centroid + Scalar(0.5) * (pts[worst] - centroid));
    const Scalar fc = fn(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + Scalar(0.5) * (pts[i] - pts[best]);
      vals[i] = fn(pts[i]);
    }
  }
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  return {pts[best], vals[best], it};
}

}  // namespace pdm
