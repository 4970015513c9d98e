#pragma once

#include <functional>

#include "pdm/family.hpp"

namespace pdm {

/// A- = sqrt(f) d/dx sqrt(f) + W, A+ = -sqrt(f) d/dx sqrt(f) + W.
enum class Ladder { minus, plus };

/// A closed-form state: maps the jet of x to the jet of psi(x).
using StateFn = std::function<Jetd(const Jetd& x)>;

/// A-psi = f psi' + f' psi / 2 + W psi; A+psi = -(f psi' + f' psi / 2) + W psi.
/// The result has one order less than min(x, psi).
inline Jetd ladder_jet(const PotentialFamily& fam, const ParamSet& p, Ladder sign, const Jetd& x, const Jetd& psi) {
  const Jetd f = fam.f(x, p);
  const Jetd kinetic = f * psi.derivative() + 0.5 * f.derivative() * psi;
  const Jetd wpsi = fam.W(x, p) * psi;
  return sign == Ladder::minus ? wpsi + kinetic : wpsi - kinetic;
}

/// Expanded PDM form -f^2 psi'' - 2 f f' psi' + (V -/+ - f f''/2 - f'^2/4) psi,
/// independent of the A+/A- factorization.  Two orders are consumed.
inline Jetd hamiltonian_jet(const PotentialFamily& fam, const ParamSet& p, Partner which, const Jetd& x,
                            const Jetd& psi) {
  const Jetd f = fam.f(x, p);
  const Jetd w = fam.W(x, p);
  const Jetd f1 = f.derivative(), f2 = f1.derivative();
  const Jetd d1 = psi.derivative(), d2 = d1.derivative();
  const Jetd fw1 = f * w.derivative();
  const Jetd v = which == Partner::minus ? w * w - fw1 : w * w + fw1;
  const Jetd veff = v - 0.5 * f * f2 - 0.25 * f1 * f1;
  return veff * psi - f * f * d2 - 2.0 * f * f1 * d1;
}

inline StateFn ladder(const PotentialFamily& fam, const ParamSet& p, Ladder sign, StateFn inner) {
  return [&fam, p, sign, inner = std::move(inner)](const Jetd& x) { return ladder_jet(fam, p, sign, x, inner(x)); };
}

inline StateFn hamiltonian(const PotentialFamily& fam, const ParamSet& p, Partner which, StateFn inner) {
  return [&fam, p, which, inner = std::move(inner)](const Jetd& x) {
    return hamiltonian_jet(fam, p, which, x, inner(x));
  };
}

/// Ground state annihilated by A-(p), in whatever normalization the family uses.
inline StateFn ground_state_fn(const PotentialFamily& fam, const ParamSet& p) {
  return [&fam, p](const Jetd& x) { return fam.ground_state(x, p); };
}

/// Smooth bump exp(-1 / (1 - r^2)), r = (x - center)/half_width, zero outside.
inline StateFn compact_bump(double center, double half_width) {
  return [center, half_width](const Jetd& x) {
    const Jetd r = (x - center) / half_width;
    if (std::abs(r.value()) >= 1.0) return Jetd(0.0, x.order());
    return exp(-1.0 / (1.0 - r * r));
  };
}

inline StateFn gaussian_bump(double center, double width) {
  return [center, width](const Jetd& x) {
    const Jetd r = (x - center) / width;
    return exp(-0.5 * r * r);
  };
}

}  // namespace pdm
