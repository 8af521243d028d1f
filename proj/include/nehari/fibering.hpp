// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/grid.hpp"
#include "nehari/numeric.hpp"
#include "nehari/roots.hpp"

namespace nehari {

// Energy along the ray t -> t u. Holds the per-point densities of u, so every
// t-evaluation re-runs the quadrature with phi at E t^2 / 2 and nothing else.
// Keeps a reference to the config, which must outlive the ray.
class Ray {
 public:
  Ray(Field const& u, ProblemConfig const& cfg) : cfg_(cfg) {
    require_same_grid(u, cfg);
    EnergyDensity const d(u);
    E_ = d.E();
    w_ = d.weights();
    A_ = weight_integral_a(u, cfg);
    B_ = weight_integral_b(u, cfg);
    CompensatedSum e;
    for (std::size_t k = 0; k < E_.size(); ++k) e.add(w_[k] * E_[k]);
    E_u_ = e.value();
  }

  ProblemConfig const& config() const { return cfg_; }
  double A() const { return A_; }
  double B() const { return B_; }
  double E() const { return E_u_; }  // int (u^2 + |grad u|^2)
  double lambda_A() const { return cfg_.lambda() * A_; }

  OperatorIntegrals integrals(double t) const { return operator_integrals(cfg_.phi(), E_, w_, t); }

  double gamma(double t) const {
    if (t < 0.0) throw DomainError("gamma: t must be >= 0");
    if (t == 0.0) return 0.0;
    double const q = cfg_.q(), p = cfg_.p();
    return integrals(t).I0 - lambda_A() * std::pow(t, q + 1.0) / (q + 1.0) -
           B_ * std::pow(t, p + 1.0) / (p + 1.0);
  }

  double gamma_prime(double t) const {
    positive(t, "gamma_prime");
    double const q = cfg_.q(), p = cfg_.p();
    return t * integrals(t).I1 - lambda_A() * std::pow(t, q) - B_ * std::pow(t, p);
  }

  double gamma_second(double t) const {
    positive(t, "gamma_second");
    double const q = cfg_.q(), p = cfg_.p();
    OperatorIntegrals const I = integrals(t);
    return I.I1 + t * t * I.I2 - q * lambda_A() * std::pow(t, q - 1.0) -
           p * B_ * std::pow(t, p - 1.0);
  }

  double m(double t) const {
    positive(t, "m");
    double const q = cfg_.q(), p = cfg_.p();
    return std::pow(t, 1.0 - q) * integrals(t).I1 - std::pow(t, p - q) * B_;
  }

  double m_prime(double t) const {
    positive(t, "m_prime");
    double const q = cfg_.q(), p = cfg_.p();
    OperatorIntegrals const I = integrals(t);
    return (1.0 - q) * std::pow(t, -q) * I.I1 + std::pow(t, 2.0 - q) * I.I2 -
           (p - q) * std::pow(t, p - q - 1.0) * B_;
  }

  double eta(double t) const {
    positive(t, "eta");
    double const q = cfg_.q(), p = cfg_.p();
    OperatorIntegrals const I = integrals(t);
    return std::pow(t, 1.0 - p) * ((1.0 - q) * I.I1 + t * t * I.I2);
  }

  double eta_prime(double t) const {
    positive(t, "eta_prime");
    double const q = cfg_.q(), p = cfg_.p();
    OperatorIntegrals const I = integrals(t);
    return (1.0 - q) * (1.0 - p) * std::pow(t, -p) * I.I1 +
           (4.0 - p - q) * std::pow(t, 2.0 - p) * I.I2 + std::pow(t, 4.0 - p) * I.I3;
  }

  double h(double t) const {
    if (t < 0.0) throw DomainError("h: t must be >= 0");
    if (t == 0.0) return 0.0;
    double const p = cfg_.p();
    return integrals(t).I0 - B_ * std::pow(t, p + 1.0) / (p + 1.0);
  }

  double h_prime(double t) const {
    positive(t, "h_prime");
    return t * integrals(t).I1 - B_ * std::pow(t, cfg_.p());
  }

  // |gamma'(t)| relative to the size of its three terms.
  double relative_gamma_prime(double t) const {
    double const q = cfg_.q(), p = cfg_.p();
    double const a = t * integrals(t).I1;
    double const b = std::abs(lambda_A()) * std::pow(t, q);
    double const c = std::abs(B_) * std::pow(t, p);
    return std::abs(a - lambda_A() * std::pow(t, q) - B_ * std::pow(t, p)) / (a + b + c);
  }

 private:
  static void positive(double t, char const* what) {
    if (!(t > 0.0)) throw DomainError(std::string(what) + ": t must be > 0");
  }

  ProblemConfig const& cfg_;
  std::vector<double> E_;
  std::vector<double> w_;
  double A_ = 0.0;
  double B_ = 0.0;
  double E_u_ = 0.0;
};

inline double gamma(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).gamma(t); }
inline double gamma_prime(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).gamma_prime(t); }
inline double gamma_second(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).gamma_second(t); }
inline double m(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).m(t); }
inline double m_prime(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).m_prime(t); }
inline double eta(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).eta(t); }
inline double eta_prime(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).eta_prime(t); }
inline double h(Field const& u, double t, ProblemConfig const& cfg) { return Ray(u, cfg).h(t); }

// |G(u)| / (int phi E + lambda |A_u| + |B_u|)
inline double relative_constraint(Field const& u, ProblemConfig const& cfg) {
  return Ray(u, cfg).relative_gamma_prime(1.0);
}

// Critical point of m_u: the root of eta(t) = (p-q) B_u, eta decreasing.
inline double find_tilde(Ray const& ray, BracketLimits const& limits = {}) {
  if (!(ray.B() > 0.0)) throw PreconditionError("find_tilde requires B_u > 0");
  double const target = (ray.config().p() - ray.config().q()) * ray.B();
  return monotone_root([&](double t) { return ray.eta(t) - target; }, false, limits).t;
}

inline double find_tilde(Field const& u, ProblemConfig const& cfg) { return find_tilde(Ray(u, cfg)); }

struct TMax {
  double t = 0.0;
  double h = 0.0;
  int critical_points = 0;  // local maxima found on the scan
};

// Global maximizer of h_u: scan h' on a geometric t-grid, bisect every + to -
// sign change, keep the largest h.
inline TMax find_tmax(Ray const& ray, BracketLimits const& limits = {}) {
  if (!(ray.B() > 0.0)) throw PreconditionError("find_tmax requires B_u > 0");
  double const factor = std::pow(2.0, 0.25);
  double t = limits.min_t;
  double f = ray.h_prime(t);
  if (!(f > 0.0)) throw BracketError("find_tmax: h' is not positive at the lower scan limit");
  TMax best;
  best.h = -std::numeric_limits<double>::infinity();
  while (t < limits.max_t) {
    double const next = std::min(t * factor, limits.max_t);
    double const f_next = ray.h_prime(next);
    if (f > 0.0 && f_next <= 0.0) {
      double const root = bisect([&](double s) { return ray.h_prime(s); }, t, next).t;
      double const value = ray.h(root);
      ++best.critical_points;
      if (value > best.h) {
        best.h = value;
        best.t = root;
      }
    }
    t = next;
    f = f_next;
  }
  if (best.critical_points == 0 || f > 0.0) {
    throw BracketError("find_tmax: h' stays positive up to t = " + format_g(limits.max_t));
  }
  return best;
}

inline TMax find_tmax(Field const& u, ProblemConfig const& cfg) { return find_tmax(Ray(u, cfg)); }

enum class FiberingCase { club1, club2, club3, club4_none, club4_tangent, club4_two };

inline std::string_view to_string(FiberingCase c) {
  switch (c) {
    case FiberingCase::club1: return "club1";
    case FiberingCase::club2: return "club2";
    case FiberingCase::club3: return "club3";
    case FiberingCase::club4_none: return "club4-none";
    case FiberingCase::club4_tangent: return "club4-tangent";
    case FiberingCase::club4_two: return "club4-two";
  }
  return "unknown";
}

struct FiberingRoot {
  double t = 0.0;
  int gamma2_sign = 0;             // sign of gamma''_{tu}(1) = t^{q+2} m'(t)
  double width = 0.0;              // final bisection bracket
  double relative_residual = 0.0;  // |gamma'(t)| relative to its terms
};

struct FiberingDiagnosis {
  double A = 0.0;
  double B = 0.0;
  double E = 0.0;
  double lambda_A = 0.0;
  FiberingCase kind = FiberingCase::club1;
  std::optional<double> t_tilde;
  std::optional<double> m_tilde;
  std::vector<FiberingRoot> roots;
  std::optional<TMax> t_max;
};

struct ClassifyOptions {
  bool with_tmax = true;
  double tangent_tol = 1e-10;
  BracketLimits limits;
  // +1 or -1: in case club4-two locate only the root with that gamma'' sign.
  int only_sign = 0;
};

inline FiberingDiagnosis classify(Ray const& ray, ClassifyOptions const& opt = {}) {
  if (ray.E() == 0.0) throw PreconditionError("classify requires a nonzero field");
  FiberingDiagnosis d;
  d.A = ray.A();
  d.B = ray.B();
  d.E = ray.E();
  d.lambda_A = ray.lambda_A();
  double const lA = d.lambda_A;
  auto const f = [&](double t) { return ray.m(t) - lA; };
  auto const make_root = [&](Root r) {
    return FiberingRoot{r.t, sign_of(ray.m_prime(r.t)), r.width, ray.relative_gamma_prime(r.t)};
  };

  if (d.B > 0.0) {
    d.t_tilde = find_tilde(ray, opt.limits);
    d.m_tilde = ray.m(*d.t_tilde);
    if (opt.with_tmax) {
      try {
        d.t_max = find_tmax(ray, opt.limits);
      } catch (BracketError const&) {
        d.t_max.reset();
      }
    }
  }

  auto const upper_root = [&] {
    double const tt = *d.t_tilde;
    double const hi = grow_upward([&](double t) { return f(t) <= 0.0; }, 2.0 * tt, opt.limits);
    return make_root(bisect(f, tt, hi));
  };
  auto const lower_root = [&] {
    double const tt = *d.t_tilde;
    double const lo = grow_downward([&](double t) { return f(t) <= 0.0; }, 0.5 * tt, opt.limits);
    return make_root(bisect(f, lo, tt));
  };

  if (lA <= 0.0 && d.B <= 0.0) {
    d.kind = FiberingCase::club1;
  } else if (lA > 0.0 && d.B <= 0.0) {
    d.kind = FiberingCase::club2;
    d.roots.push_back(make_root(monotone_root(f, true, opt.limits)));
  } else if (lA <= 0.0) {
    d.kind = FiberingCase::club3;
    d.roots.push_back(upper_root());
  } else {
    double const gap = *d.m_tilde - lA;
    if (std::abs(gap) <= opt.tangent_tol * (1.0 + std::abs(lA))) {
      d.kind = FiberingCase::club4_tangent;
      d.roots.push_back({*d.t_tilde, 0, 0.0, ray.relative_gamma_prime(*d.t_tilde)});
    } else if (gap < 0.0) {
      d.kind = FiberingCase::club4_none;
    } else {
      d.kind = FiberingCase::club4_two;
      if (opt.only_sign != -1) d.roots.push_back(lower_root());
      if (opt.only_sign != 1) d.roots.push_back(upper_root());
    }
  }
  return d;
}

inline FiberingDiagnosis classify(Field const& u, ProblemConfig const& cfg,
                                  ClassifyOptions const& opt = {}) {
  return classify(Ray(u, cfg), opt);
}

enum class Branch { plus, minus };

inline std::string_view to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

struct ProjectionError : std::runtime_error {
  ProjectionError(std::string const& what, FiberingDiagnosis diag)
      : std::runtime_error(what), diagnosis(std::move(diag)) {}
  FiberingDiagnosis diagnosis;
};

struct NehariPoint {
  Field u;
  Branch branch = Branch::plus;
  double energy = 0.0;
  double constraint = 0.0;  // relative |G(u)|
  double gamma2 = 0.0;      // gamma''_u(1)
  double t_star = 1.0;
  FiberingDiagnosis diagnosis;
};

// Scales u onto the requested branch: the root with gamma'' > 0 (plus) or
// gamma'' < 0 (minus). Tangent roots are never used.
inline NehariPoint project(Field const& u, ProblemConfig const& cfg, Branch branch) {
  require_same_grid(u, cfg);
  if (u.is_zero()) throw PreconditionError("cannot project the zero field");
  int const want = branch == Branch::plus ? 1 : -1;
  ClassifyOptions opt;
  opt.with_tmax = false;
  opt.only_sign = want;
  Ray const ray(u, cfg);
  FiberingDiagnosis diag;
  try {
    diag = classify(ray, opt);
  } catch (BracketError const& e) {
    diag.A = ray.A();
    diag.B = ray.B();
    diag.E = ray.E();
    diag.lambda_A = ray.lambda_A();
    throw ProjectionError(std::string("root outside the bracket limits: ") + e.what(), std::move(diag));
  }
  FiberingRoot const* chosen = nullptr;
  for (auto const& r : diag.roots) {
    if (r.gamma2_sign == want) chosen = &r;
  }
  if (chosen == nullptr || diag.kind == FiberingCase::club4_tangent) {
    throw ProjectionError("no " + std::string(to_string(branch)) + " root on this ray (case " +
                              std::string(to_string(diag.kind)) + ")",
                          std::move(diag));
  }
  double const t = chosen->t;
  Field v = u.scaled(t);
  Ray const at(v, cfg);
  NehariPoint out{v, branch, at.gamma(1.0), at.relative_gamma_prime(1.0), at.gamma_second(1.0), t,
                  std::move(diag)};
  return out;
}

}  // namespace nehari
