#include "pdm/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pdm/quadrature.hpp"

namespace pdm {

bool ParamSet::all_finite() const {
  return std::isfinite(lambda) && std::isfinite(alpha) && (!mu || std::isfinite(*mu)) &&
         (!beta || std::isfinite(*beta));
}

std::string ParamSet::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "(lambda=" << lambda;
  if (mu) os << ", mu=" << *mu;
  os << ", alpha=" << alpha;
  if (beta) os << ", beta=" << *beta;
  os << ")";
  return os.str();
}

std::string_view to_string(EndpointKind k) {
  switch (k) {
    case EndpointKind::regular: return "regular";
    case EndpointKind::singular_wall: return "singular-wall";
    case EndpointKind::decay_at_infinity: return "decay-at-infinity";
  }
  return "?";
}

std::string_view to_string(GridStrategy s) { return s == GridStrategy::mapped ? "mapped" : "truncated"; }

std::string_view to_string(SusyStatus s) {
  switch (s) {
    case SusyStatus::unbroken: return "unbroken";
    case SusyStatus::broken: return "broken";
    case SusyStatus::regime_dependent: return "regime-dependent";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::unbroken: return "unbroken";
    case Regime::broken: return "broken";
    case Regime::unclassified: return "unclassified";
  }
  return "?";
}

double DomainSpec::reference_point() const {
  if (bounded()) return 0.5 * (lower + upper);
  if (std::isfinite(lower)) return lower + 1.0;
  if (std::isfinite(upper)) return upper - 1.0;
  return 0.0;
}

void PotentialFamily::require_valid(const ParamSet& p) const {
  if (!p.all_finite()) throw InvalidParams(std::string(id()) + ": parameters must be finite");
  if (auto why = validity_violation(p)) throw InvalidParams(std::string(id()) + ": " + *why);
}

std::optional<double> PotentialFamily::spectrum_closed_form(int, const ParamSet&) const { return std::nullopt; }

double quadrature_superpotential_integral(const PotentialFamily& fam, const ParamSet& p, double x) {
  const double x0 = fam.domain().reference_point();
  return adaptive_simpson([&](double t) { return fam.W(t, p) / fam.f(t, p); }, x0, x, 1e-12);
}

double PotentialFamily::superpotential_integral(double x, const ParamSet& p) const {
  return quadrature_superpotential_integral(*this, p, x);
}

double PotentialFamily::log_ground_state(double x, const ParamSet& p) const {
  return -0.5 * std::log(f(x, p)) - superpotential_integral(x, p);
}

Jetd PotentialFamily::ground_state(const Jetd& x, const ParamSet& p) const {
  const Jetd fx = f(x, p);
  const Jetd phi = (W(x, p) / fx).integral(superpotential_integral(x.value(), p));
  return pow(fx, -0.5) * exp(-phi);
}

namespace {

constexpr double kPi = std::numbers::pi;

std::optional<std::string> missing(const ParamSet& p, bool need_mu, bool need_beta) {
  if (need_mu && !p.mu) return "mu is required";
  if (need_beta && !p.beta) return "beta is required";
  return std::nullopt;
}

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

// log(sinh x) for x > 0 without overflow.
double log_sinh(double x) {
  if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

// log(1 + a sinh^2 x) for a > 0, x > 0 without overflow.
double log_one_plus_a_sinh2(double a, double x) {
  if (x > 20.0) {
    const double ls = log_sinh(x);
    return std::log(a) + 2.0 * ls + std::log1p(std::exp(-2.0 * ls) / a);
  }
  return std::log1p(a * std::sinh(x) * std::sinh(x));
}

template <class Impl>
class FamilyModel : public PotentialFamily {
 public:
  double W(double x, const ParamSet& p) const final { return Impl::superpotential(x, p); }
  Jetd W(const Jetd& x, const ParamSet& p) const final { return Impl::superpotential(x, p); }
  double f(double x, const ParamSet& p) const final { return Impl::deforming(x, p); }
  Jetd f(const Jetd& x, const ParamSet& p) const final { return Impl::deforming(x, p); }

  Jetd ground_state(const Jetd& x, const ParamSet& p) const override {
    if constexpr (requires { Impl::closed_ground_state(x, p); })
      return Impl::closed_ground_state(x, p);
    else
      return PotentialFamily::ground_state(x, p);
  }
  bool has_closed_form_ground_state() const override {
    return requires(const Jetd& x, const ParamSet& p) { Impl::closed_ground_state(x, p); };
  }
};

// W = lambda x, f = 1 + alpha x^2.
class Ex1 final : public FamilyModel<Ex1> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) { return p.lambda * x; }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) { return 1.0 + p.alpha * x * x; }
  template <class T>
  static T closed_ground_state(const T& x, const ParamSet& p) {
    if (p.alpha == 0.0) return exp(-0.5 * p.lambda * x * x);
    return pow(deforming(x, p), -(0.5 + p.lambda / (2.0 * p.alpha)));
  }

  std::string_view id() const override { return "ex1"; }
  std::string_view description() const override { return "W = lambda x, f = 1 + alpha x^2"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "alpha"}; }
  DomainSpec domain() const override { return {}; }
  SusyStatus susy_status() const override { return SusyStatus::unbroken; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (!(p.alpha >= 0.0)) return "alpha must satisfy alpha >= 0";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    return {p.lambda * x, p.lambda, 1.0 + p.alpha * x * x, 2.0 * p.alpha * x, 2.0 * p.alpha};
  }
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    q.lambda = p.lambda + p.alpha;
    return q;
  }
  double remainder(const ParamSet& p) const override { return 2.0 * p.lambda + p.alpha; }
  std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const override {
    return 2.0 * n * p.lambda + double(n) * n * p.alpha;
  }
  Regime regime(const ParamSet& p) const override { return p.lambda > 0 ? Regime::unbroken : Regime::unclassified; }
  std::optional<std::string> numerics_unsupported(const ParamSet& p) const override {
    if (p.lambda <= 0) return "ground state is not normalizable for lambda <= 0";
    if (p.alpha > 0 && p.lambda / p.alpha <= 0.5) return "mapped wall exponent lambda/alpha must exceed 1/2";
    return std::nullopt;
  }
  double to_mapped(double x, const ParamSet& p) const override {
    if (p.alpha == 0.0) return x;
    const double s = std::sqrt(p.alpha);
    return std::atan(s * x) / s;
  }
  double from_mapped(double u, const ParamSet& p) const override {
    if (p.alpha == 0.0) return u;
    const double s = std::sqrt(p.alpha);
    return std::tan(s * u) / s;
  }
  double log_ground_state(double x, const ParamSet& p) const override {
    if (p.alpha == 0.0) return -0.5 * p.lambda * x * x;
    return -(0.5 + p.lambda / (2.0 * p.alpha)) * std::log1p(p.alpha * x * x);
  }
  double superpotential_integral(double x, const ParamSet& p) const override {
    if (p.alpha == 0.0) return 0.5 * p.lambda * x * x;
    return p.lambda / (2.0 * p.alpha) * std::log1p(p.alpha * x * x);
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.alpha = uniform(rng, 0.05, 1.0);
    p.lambda = uniform(rng, 0.6, 3.0);
    return p;
  }
};

// W = lambda tan x + mu sec x, f = 1 + alpha sin x on (-pi/2, pi/2).
class Ex2 final : public FamilyModel<Ex2> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) {
    using std::cos;
    using std::sin;
    return (p.lambda * sin(x) + p.mu_or_zero()) / cos(x);
  }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) {
    using std::sin;
    return 1.0 + p.alpha * sin(x);
  }

  std::string_view id() const override { return "ex2"; }
  std::string_view description() const override { return "W = lambda tan x + mu sec x, f = 1 + alpha sin x"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "mu", "alpha"}; }
  DomainSpec domain() const override {
    return {-kPi / 2, kPi / 2, EndpointKind::singular_wall, EndpointKind::singular_wall, GridStrategy::mapped};
  }
  SusyStatus susy_status() const override { return SusyStatus::unbroken; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (auto m = missing(p, true, false)) return m;
    if (!(p.alpha > -1.0 && p.alpha < 1.0)) return "alpha must satisfy -1 < alpha < 1";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    const double c = std::cos(x), s = std::sin(x), mu = p.mu_or_zero();
    return {(p.lambda * s + mu) / c, (p.lambda + mu * s) / (c * c), 1.0 + p.alpha * s, p.alpha * c, -p.alpha * s};
  }
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    q.lambda = p.lambda + 1.0;
    q.mu = p.mu_or_zero() + p.alpha;
    return q;
  }
  double remainder(const ParamSet& p) const override {
    return 2.0 * p.lambda + 1.0 - p.alpha * (2.0 * p.mu_or_zero() + p.alpha);
  }
  std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const override {
    return double(n) * n * (1.0 - p.alpha * p.alpha) + 2.0 * n * (p.lambda - p.alpha * p.mu_or_zero());
  }
  // psi0 ~ (pi/2 - x)^{s+} and (x + pi/2)^{s-}.
  static double upper_exponent(const ParamSet& p) { return (p.lambda + p.mu_or_zero()) / (1.0 + p.alpha); }
  static double lower_exponent(const ParamSet& p) { return (p.lambda - p.mu_or_zero()) / (1.0 - p.alpha); }
  Regime regime(const ParamSet& p) const override {
    return upper_exponent(p) > -0.5 && lower_exponent(p) > -0.5 ? Regime::unbroken : Regime::unclassified;
  }
  std::optional<std::string> numerics_unsupported(const ParamSet& p) const override {
    if (upper_exponent(p) <= 0.5 || lower_exponent(p) <= 0.5)
      return "wall exponents (lambda+mu)/(1+alpha) and (lambda-mu)/(1-alpha) must exceed 1/2";
    return std::nullopt;
  }
  double to_mapped(double x, const ParamSet& p) const override {
    const double s = std::sqrt(1.0 - p.alpha * p.alpha);
    return 2.0 / s * (std::atan((std::tan(0.5 * x) + p.alpha) / s) - std::atan(p.alpha / s));
  }
  double from_mapped(double u, const ParamSet& p) const override {
    const double s = std::sqrt(1.0 - p.alpha * p.alpha);
    const double t = s * std::tan(0.5 * s * u + std::atan(p.alpha / s)) - p.alpha;
    return 2.0 * std::atan(t);
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.alpha = uniform(rng, -0.6, 0.6);
    p.lambda = uniform(rng, 1.5, 4.0);
    p.mu = uniform(rng, -0.5, 0.5);
    return p;
  }
};

// Table 1 row 1: W = lambda/x + mu x, f = alpha x^2 + 1 on (0, inf).
class T1R1 final : public FamilyModel<T1R1> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) { return p.lambda / x + p.mu_or_zero() * x; }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) { return 1.0 + p.alpha * x * x; }
  static double tail_power(const ParamSet& p) { return 0.5 + (p.mu_or_zero() - p.alpha * p.lambda) / (2.0 * p.alpha); }
  template <class T>
  static T closed_ground_state(const T& x, const ParamSet& p) {
    return pow(x, -p.lambda) * pow(deforming(x, p), -tail_power(p));
  }

  std::string_view id() const override { return "t1r1"; }
  std::string_view description() const override { return "W = lambda/x + mu x, f = alpha x^2 + 1"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "mu", "alpha"}; }
  DomainSpec domain() const override {
    return {0.0, std::numeric_limits<double>::infinity(), EndpointKind::singular_wall, EndpointKind::decay_at_infinity,
            GridStrategy::mapped};
  }
  SusyStatus susy_status() const override { return SusyStatus::regime_dependent; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (auto m = missing(p, true, false)) return m;
    if (!(p.alpha > 0.0)) return "alpha must satisfy alpha > 0";
    if (p.lambda == 0.0) return "lambda must be nonzero";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    const double mu = p.mu_or_zero();
    return {p.lambda / x + mu * x, -p.lambda / (x * x) + mu, 1.0 + p.alpha * x * x, 2.0 * p.alpha * x, 2.0 * p.alpha};
  }
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    q.lambda = p.lambda - 1.0;
    q.mu = p.mu_or_zero() + p.alpha;
    return q;
  }
  double remainder(const ParamSet& p) const override { return -4.0 * (p.alpha * p.lambda - p.mu_or_zero() - p.alpha); }
  std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const override {
    return n * remainder(p) + 4.0 * p.alpha * n * (n - 1);
  }
  Regime regime(const ParamSet& p) const override {
    const double mu = p.mu_or_zero();
    if (p.lambda < 0 && mu > -0.5 * p.alpha) return Regime::unbroken;
    if (p.lambda > 0 && mu > -p.alpha) return Regime::broken;
    return Regime::unclassified;
  }
  std::optional<std::string> numerics_unsupported(const ParamSet& p) const override {
    if (!(p.lambda < 0 && p.lambda * (p.lambda + 1.0) > 0))
      return "inverse-square wall requires lambda(lambda+1) > 0 with lambda < 0";
    if (p.mu_or_zero() / p.alpha <= 0.5) return "mapped far-wall exponent mu/alpha must exceed 1/2";
    return std::nullopt;
  }
  double to_mapped(double x, const ParamSet& p) const override {
    const double s = std::sqrt(p.alpha);
    return std::atan(s * x) / s;
  }
  double from_mapped(double u, const ParamSet& p) const override {
    const double s = std::sqrt(p.alpha);
    return std::tan(s * u) / s;
  }
  double log_ground_state(double x, const ParamSet& p) const override {
    return -p.lambda * std::log(x) - tail_power(p) * std::log1p(p.alpha * x * x);
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.alpha = uniform(rng, 0.2, 1.0);
    p.lambda = uniform(rng, -3.0, -1.2);
    p.mu = uniform(rng, p.alpha, 2.0 * p.alpha + 1.0);
    return p;
  }
};

// Table 1 row 2: W = lambda tan x, f = 1 + alpha sin^2 x on (-pi/2, pi/2).
class T1R2 final : public FamilyModel<T1R2> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) {
    using std::tan;
    return p.lambda * tan(x);
  }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) {
    using std::sin;
    return 1.0 + p.alpha * sq(sin(x));
  }
  template <class T>
  static T closed_ground_state(const T& x, const ParamSet& p) {
    using std::cos;
    const double s = p.lambda / (1.0 + p.alpha);
    return pow(deforming(x, p), -0.5 - 0.5 * s) * pow(cos(x), s);
  }

  std::string_view id() const override { return "t1r2"; }
  std::string_view description() const override { return "W = lambda tan x, f = 1 + alpha sin^2 x"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "alpha"}; }
  DomainSpec domain() const override {
    return {-kPi / 2, kPi / 2, EndpointKind::singular_wall, EndpointKind::singular_wall, GridStrategy::mapped};
  }
  SusyStatus susy_status() const override { return SusyStatus::unbroken; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (!(p.lambda > 0.0)) return "lambda must satisfy lambda > 0";
    if (!(p.alpha > -1.0)) return "alpha must satisfy alpha > -1";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    const double c = std::cos(x), s = std::sin(x);
    return {p.lambda * s / c, p.lambda / (c * c), 1.0 + p.alpha * s * s, p.alpha * std::sin(2 * x),
            2.0 * p.alpha * std::cos(2 * x)};
  }
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    q.lambda = p.lambda + p.alpha + 1.0;
    return q;
  }
  double remainder(const ParamSet& p) const override { return 2.0 * p.lambda + p.alpha + 1.0; }
  std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const override {
    return 2.0 * n * p.lambda + double(n) * n * (p.alpha + 1.0);
  }
  Regime regime(const ParamSet&) const override { return Regime::unbroken; }
  std::optional<std::string> numerics_unsupported(const ParamSet& p) const override {
    if (p.lambda / (1.0 + p.alpha) <= 0.5) return "wall exponent lambda/(1+alpha) must exceed 1/2";
    return std::nullopt;
  }
  double to_mapped(double x, const ParamSet& p) const override {
    const double c = std::sqrt(1.0 + p.alpha);
    return std::atan(c * std::tan(x)) / c;
  }
  double from_mapped(double u, const ParamSet& p) const override {
    const double c = std::sqrt(1.0 + p.alpha);
    return std::atan(std::tan(c * u) / c);
  }
  double log_ground_state(double x, const ParamSet& p) const override {
    const double s = p.lambda / (1.0 + p.alpha);
    return (-0.5 - 0.5 * s) * std::log(deforming(x, p)) + s * std::log(std::cos(x));
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.alpha = uniform(rng, -0.5, 1.5);
    p.lambda = uniform(rng, 1.5, 4.0);
    return p;
  }
};

// Table 1 row 3: W = lambda cot x, f = 1 + beta sin^2 x on (0, pi).
class T1R3 final : public FamilyModel<T1R3> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) {
    using std::cos;
    using std::sin;
    return p.lambda * cos(x) / sin(x);
  }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) {
    using std::sin;
    return 1.0 + p.beta_or_zero() * sq(sin(x));
  }
  template <class T>
  static T closed_ground_state(const T& x, const ParamSet& p) {
    using std::sin;
    return pow(deforming(x, p), -0.5 + 0.5 * p.lambda) * pow(sin(x), -p.lambda);
  }

  std::string_view id() const override { return "t1r3"; }
  std::string_view description() const override { return "W = lambda cot x, f = 1 + beta sin^2 x"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "beta"}; }
  DomainSpec domain() const override {
    return {0.0, kPi, EndpointKind::singular_wall, EndpointKind::singular_wall, GridStrategy::mapped};
  }
  SusyStatus susy_status() const override { return SusyStatus::unbroken; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (auto m = missing(p, false, true)) return m;
    if (!(p.lambda < 0.0)) return "lambda must satisfy lambda < 0";
    if (!(*p.beta > -1.0)) return "beta must satisfy beta > -1";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    const double c = std::cos(x), s = std::sin(x), b = p.beta_or_zero();
    return {p.lambda * c / s, -p.lambda / (s * s), 1.0 + b * s * s, b * std::sin(2 * x), 2.0 * b * std::cos(2 * x)};
  }
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    q.lambda = p.lambda - 1.0;
    return q;
  }
  double remainder(const ParamSet& p) const override { return -(1.0 + p.beta_or_zero()) * (2.0 * p.lambda - 1.0); }
  std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const override {
    return n * remainder(p) + (1.0 + p.beta_or_zero()) * n * (n - 1);
  }
  Regime regime(const ParamSet&) const override { return Regime::unbroken; }
  std::optional<std::string> numerics_unsupported(const ParamSet& p) const override {
    if (-p.lambda <= 0.5) return "wall exponent -lambda must exceed 1/2";
    return std::nullopt;
  }
  double to_mapped(double x, const ParamSet& p) const override {
    const double c = std::sqrt(1.0 + p.beta_or_zero());
    return std::atan(std::tan(x - kPi / 2) / c) / c;
  }
  double from_mapped(double u, const ParamSet& p) const override {
    const double c = std::sqrt(1.0 + p.beta_or_zero());
    return std::atan(c * std::tan(c * u)) + kPi / 2;
  }
  double log_ground_state(double x, const ParamSet& p) const override {
    return (-0.5 + 0.5 * p.lambda) * std::log(deforming(x, p)) - p.lambda * std::log(std::sin(x));
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.beta = uniform(rng, -0.5, 1.5);
    p.lambda = uniform(rng, -3.0, -0.8);
    return p;
  }
};

// Table 1 row 4: W = lambda coth x, f = 1 + alpha sinh^2 x on (0, inf).
class T1R4 final : public FamilyModel<T1R4> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) {
    using std::cosh;
    using std::sinh;
    return p.lambda * cosh(x) / sinh(x);
  }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) {
    using std::sinh;
    return 1.0 + p.alpha * sq(sinh(x));
  }
  template <class T>
  static T closed_ground_state(const T& x, const ParamSet& p) {
    using std::sinh;
    return pow(deforming(x, p), -0.5 + 0.5 * p.lambda) * pow(sinh(x), -p.lambda);
  }

  std::string_view id() const override { return "t1r4"; }
  std::string_view description() const override { return "W = lambda coth x, f = 1 + alpha sinh^2 x"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "alpha"}; }
  DomainSpec domain() const override {
    return {0.0, std::numeric_limits<double>::infinity(), EndpointKind::singular_wall, EndpointKind::decay_at_infinity,
            GridStrategy::truncated};
  }
  SusyStatus susy_status() const override { return SusyStatus::unbroken; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (!(p.lambda < 0.0)) return "lambda must satisfy lambda < 0";
    if (!(p.alpha > 0.0)) return "alpha must satisfy alpha > 0";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    const double s = std::sinh(x), c = std::cosh(x);
    return {p.lambda * c / s, -p.lambda / (s * s), 1.0 + p.alpha * s * s, p.alpha * std::sinh(2 * x),
            2.0 * p.alpha * std::cosh(2 * x)};
  }
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    q.lambda = p.lambda - 1.0;
    return q;
  }
  double remainder(const ParamSet& p) const override { return (1.0 - p.alpha) * (2.0 * p.lambda - 1.0); }
  std::optional<double> spectrum_closed_form(int n, const ParamSet& p) const override {
    return n * remainder(p) + (p.alpha - 1.0) * n * (n - 1);
  }
  Regime regime(const ParamSet&) const override { return Regime::unbroken; }
  // f grows like e^{2x}, so x = infinity sits at finite u where f^{1/2} psi0
  // tends to a nonzero constant; a Dirichlet grid selects a different operator.
  std::optional<std::string> numerics_unsupported(const ParamSet&) const override {
    return "x = infinity lies at finite mapped distance where f^{1/2} psi0 does not vanish; "
           "Dirichlet truncation does not represent this spectrum";
  }
  // With y = tanh x the integral of dx/f becomes the integral of dy / (1 + (alpha - 1) y^2).
  double to_mapped(double x, const ParamSet& p) const override {
    const double y = std::tanh(x), k = p.alpha - 1.0;
    if (k > 0) return std::atan(std::sqrt(k) * y) / std::sqrt(k);
    if (k < 0) return std::atanh(std::sqrt(-k) * y) / std::sqrt(-k);
    return y;
  }
  double from_mapped(double u, const ParamSet& p) const override {
    const double k = p.alpha - 1.0;
    double y = u;
    if (k > 0) y = std::tan(std::sqrt(k) * u) / std::sqrt(k);
    if (k < 0) y = std::tanh(std::sqrt(-k) * u) / std::sqrt(-k);
    return std::atanh(y);
  }
  double log_ground_state(double x, const ParamSet& p) const override {
    return (-0.5 + 0.5 * p.lambda) * log_one_plus_a_sinh2(p.alpha, x) - p.lambda * log_sinh(x);
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.alpha = uniform(rng, 1.2, 3.0);
    p.lambda = uniform(rng, -3.0, -0.5);
    return p;
  }
};

// Two-parameter generalization: W = lambda x + mu, f = alpha x^2 + 2 beta x + 1.
class Gen2 final : public FamilyModel<Gen2> {
 public:
  template <class T>
  static T superpotential(const T& x, const ParamSet& p) { return p.lambda * x + p.mu_or_zero(); }
  template <class T>
  static T deforming(const T& x, const ParamSet& p) { return p.alpha * x * x + 2.0 * p.beta_or_zero() * x + 1.0; }

  std::string_view id() const override { return "gen2"; }
  std::string_view description() const override { return "W = lambda x + mu, f = alpha x^2 + 2 beta x + 1"; }
  std::vector<std::string> parameter_names() const override { return {"lambda", "mu", "alpha", "beta"}; }
  DomainSpec domain() const override { return {}; }
  SusyStatus susy_status() const override { return SusyStatus::unbroken; }

  std::optional<std::string> validity_violation(const ParamSet& p) const override {
    if (auto m = missing(p, true, true)) return m;
    if (!(p.alpha > 0.0)) return "alpha must satisfy alpha > 0";
    if (!(*p.beta * *p.beta < p.alpha)) return "beta must satisfy beta^2 < alpha (f > 0)";
    if (!(p.lambda > 0.0)) return "lambda must satisfy lambda > 0";
    return std::nullopt;
  }
  FamilyValues values(double x, const ParamSet& p) const override {
    const double b = p.beta_or_zero();
    return {p.lambda * x + p.mu_or_zero(), p.lambda, deforming(x, p), 2.0 * p.alpha * x + 2.0 * b, 2.0 * p.alpha};
  }
  // Matching the x^2 and x coefficients of V+(p) and V-(p').
  ParamSet step(const ParamSet& p) const override {
    ParamSet q = p;
    const double l = p.lambda, m = p.mu_or_zero(), a = p.alpha, b = p.beta_or_zero();
    q.lambda = l + a;
    q.mu = (l * m + 2.0 * b * l + a * b) / (l + a);
    return q;
  }
  double remainder(const ParamSet& p) const override {
    const ParamSet q = step(p);
    return p.mu_or_zero() * p.mu_or_zero() - q.mu_or_zero() * q.mu_or_zero() + p.lambda + q.lambda;
  }
  Regime regime(const ParamSet& p) const override { return p.lambda > 0 ? Regime::unbroken : Regime::unclassified; }
  std::optional<std::string> numerics_unsupported(const ParamSet& p) const override {
    if (p.lambda / p.alpha <= 0.5) return "mapped wall exponent lambda/alpha must exceed 1/2";
    return std::nullopt;
  }
  double to_mapped(double x, const ParamSet& p) const override {
    const double d = std::sqrt(p.alpha - p.beta_or_zero() * p.beta_or_zero());
    return std::atan((p.alpha * x + p.beta_or_zero()) / d) / d;
  }
  double from_mapped(double u, const ParamSet& p) const override {
    const double d = std::sqrt(p.alpha - p.beta_or_zero() * p.beta_or_zero());
    return (d * std::tan(d * u) - p.beta_or_zero()) / p.alpha;
  }
  // (lambda/2alpha) log f + (mu - lambda beta/alpha) atan((alpha x + beta)/d)/d
  double superpotential_integral(double x, const ParamSet& p) const override {
    const double a = p.alpha, b = p.beta_or_zero(), d = std::sqrt(a - b * b);
    return p.lambda / (2.0 * a) * std::log(deforming(x, p)) +
           (p.mu_or_zero() - p.lambda * b / a) * std::atan((a * x + b) / d) / d;
  }
  ParamSet sample(std::mt19937_64& rng) const override {
    ParamSet p;
    p.alpha = uniform(rng, 0.2, 1.0);
    const double bmax = 0.6 * std::sqrt(p.alpha);
    p.beta = uniform(rng, -bmax, bmax);
    p.lambda = uniform(rng, 0.6, 2.0);
    p.mu = uniform(rng, -1.0, 1.0);
    return p;
  }

};

}  // namespace

const std::vector<FamilyPtr>& catalog() {
  static const std::vector<FamilyPtr> families = {
      std::make_shared<Ex1>(),  std::make_shared<Ex2>(),  std::make_shared<T1R1>(), std::make_shared<T1R2>(),
      std::make_shared<T1R3>(), std::make_shared<T1R4>(), std::make_shared<Gen2>(),
  };
  return families;
}

FamilyPtr find_family(std::string_view id) {
  for (const auto& fam : catalog())
    if (fam->id() == id) return fam;
  throw std::invalid_argument("unknown family '" + std::string(id) + "'");
}

namespace {

void require_inside(const PotentialFamily& fam, double x) {
  if (!fam.domain().contains(x)) {
    std::ostringstream os;
    os << fam.id() << ": x = " << x << " is outside the open domain";
    throw DomainError(os.str());
  }
}

}  // namespace

FamilyValues evaluate_family(const PotentialFamily& fam, const ParamSet& p, double x) {
  fam.require_valid(p);
  require_inside(fam, x);
  return fam.values(x, p);
}

PartnerPair partner_potentials(const PotentialFamily& fam, const ParamSet& p, double x) {
  const FamilyValues v = evaluate_family(fam, p, x);
  const double w2 = v.W * v.W, fw = v.f * v.Wx;
  return {w2 - fw, w2 + fw};
}

double partner_potential(const PotentialFamily& fam, const ParamSet& p, Partner which, double x) {
  const PartnerPair v = partner_potentials(fam, p, x);
  return which == Partner::minus ? v.Vminus : v.Vplus;
}

EffectivePotential effective_potential(const PotentialFamily& fam, const ParamSet& p, Partner which, double x) {
  const FamilyValues v = evaluate_family(fam, p, x);
  const double V = v.W * v.W + (which == Partner::minus ? -1.0 : 1.0) * v.f * v.Wx;
  return {V - 0.5 * v.f * v.fxx - 0.25 * v.fx * v.fx, 1.0 / (v.f * v.f)};
}

SteppedParams step_params(const PotentialFamily& fam, const ParamSet& p) {
  fam.require_valid(p);
  SteppedParams out{fam.step(p)};
  out.left_validity = !fam.is_valid(out.params);
  return out;
}

double R_of(const PotentialFamily& fam, const ParamSet& p) {
  fam.require_valid(p);
  return fam.remainder(p);
}

double gen2_printed_mu_step(const ParamSet& p, int n) {
  const double l = p.lambda, m = p.mu_or_zero(), a = p.alpha, b = p.beta_or_zero();
  return (l * m + 2.0 * b * l + double(n) * n * a * b) / (l + a);
}

}  // namespace pdm
