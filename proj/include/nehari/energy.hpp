// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/numeric.hpp"
#include "nehari/phi.hpp"

namespace nehari {

struct Tolerances {
  double root = 1e-12;      // relative Nehari constraint residual
  double residual = 1e-6;   // dual norm of the gradient at convergence
};

// Discrete problem data. The constructor enforces 1 < q+1 < 2 < p+1 < 2*
// (2* = +inf for N <= 2) and lambda > 0.
class ProblemConfig {
 public:
  ProblemConfig(PhiModel phi, Field a, Field b, double q, double p, double lambda,
                Tolerances tol = {})
      : phi_(std::move(phi)), a_(std::move(a)), b_(std::move(b)), q_(q), p_(p), lambda_(lambda),
        tol_(tol) {
    if (!(q_ > 0.0 && q_ < 1.0)) throw ConfigError("q must lie in (0,1)");
    if (!(p_ > 1.0)) throw ConfigError("p must be > 1");
    if (!(p_ + 1.0 < a_.grid().critical_exponent())) throw ConfigError("p+1 must be < 2*");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw ConfigError("lambda must be > 0");
    if (a_.grid() != b_.grid()) throw ConfigError("weights a and b live on different grids");
    if (!(tol_.root > 0.0) || !(tol_.residual > 0.0)) throw ConfigError("tolerances must be positive");
  }

  Grid const& grid() const { return a_.grid(); }
  PhiModel const& phi() const { return phi_; }
  Field const& a() const { return a_; }
  Field const& b() const { return b_; }
  double q() const { return q_; }
  double p() const { return p_; }
  double lambda() const { return lambda_; }
  Tolerances const& tol() const { return tol_; }

  ProblemConfig with_lambda(double lambda) const {
    return ProblemConfig(phi_, a_, b_, q_, p_, lambda, tol_);
  }

 private:
  PhiModel phi_;
  Field a_;
  Field b_;
  double q_;
  double p_;
  double lambda_;
  Tolerances tol_;
};

inline void require_same_grid(Field const& u, ProblemConfig const& cfg) {
  if (u.grid() != cfg.grid()) throw PreconditionError("field grid does not match the problem grid");
}

// A_u = int a |u|^{q+1}
inline double weight_integral_a(Field const& u, ProblemConfig const& cfg) {
  CompensatedSum s;
  for (std::size_t i = 0; i < u.size(); ++i) s.add(cfg.a()[i] * std::pow(std::abs(u[i]), cfg.q() + 1.0));
  return cfg.grid().cell_volume() * s.value();
}

// B_u = int b |u|^{p+1}
inline double weight_integral_b(Field const& u, ProblemConfig const& cfg) {
  CompensatedSum s;
  for (std::size_t i = 0; i < u.size(); ++i) s.add(cfg.b()[i] * std::pow(std::abs(u[i]), cfg.p() + 1.0));
  return cfg.grid().cell_volume() * s.value();
}

// Integrals of the operator part along the ray t u, with s_p = E_p t^2 / 2:
// I0 = int Phi(s), I1 = int phi(s) E, I2 = int phi'(s) E^2, I3 = int phi''(s) E^3.
struct OperatorIntegrals {
  double I0 = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
};

inline OperatorIntegrals operator_integrals(PhiModel const& phi, std::vector<double> const& E,
                                            std::vector<double> const& w, double t) {
  CompensatedSum s0, s1, s2, s3;
  double const half_t2 = 0.5 * t * t;
  phi.visit([&](auto const& m) {
    for (std::size_t k = 0; k < E.size(); ++k) {
      double const e = E[k];
      double const s = e * half_t2;
      double const wk = w[k];
      s0.add(wk * m.Phi(s));
      s1.add(wk * m.phi(s) * e);
      s2.add(wk * m.phi1(s) * e * e);
      s3.add(wk * m.phi2(s) * e * e * e);
    }
  });
  return {s0.value(), s1.value(), s2.value(), s3.value()};
}

inline double J(Field const& u, ProblemConfig const& cfg) {
  require_same_grid(u, cfg);
  EnergyDensity const d(u);
  OperatorIntegrals const I = operator_integrals(cfg.phi(), d.E(), d.weights(), 1.0);
  return I.I0 - cfg.lambda() / (cfg.q() + 1.0) * weight_integral_a(u, cfg) -
         weight_integral_b(u, cfg) / (cfg.p() + 1.0);
}

// Exact derivative of the discrete J with respect to the node values.
inline Field J_grad(Field const& u, ProblemConfig const& cfg) {
  require_same_grid(u, cfg);
  EnergyDensity const d(u);
  std::vector<double> kappa(d.points());
  cfg.phi().visit([&](auto const& m) {
    for (std::size_t k = 0; k < d.points(); ++k) kappa[k] = d.weights()[k] * m.phi(0.5 * d.E()[k]);
  });
  std::vector<double> g = d.adjoint(kappa);
  double const W = cfg.grid().cell_volume();
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] -= W * (cfg.lambda() * cfg.a()[i] * signed_power(u[i], cfg.q()) +
                 cfg.b()[i] * signed_power(u[i], cfg.p()));
  }
  return Field(cfg.grid(), std::move(g));
}

// <J'(u), u> = int phi E - lambda A_u - B_u
inline double G(Field const& u, ProblemConfig const& cfg) {
  require_same_grid(u, cfg);
  EnergyDensity const d(u);
  OperatorIntegrals const I = operator_integrals(cfg.phi(), d.E(), d.weights(), 1.0);
  return I.I1 - cfg.lambda() * weight_integral_a(u, cfg) - weight_integral_b(u, cfg);
}

struct Gamma2Forms {
  double form26 = 0.0;  // int [phi' E^2 + (1-q) phi E] - (p-q) B_u
  double form27 = 0.0;  // int [phi' E^2 - (p-1) phi E] + lambda (p-q) A_u
};

inline Gamma2Forms gamma2_forms(Field const& u, ProblemConfig const& cfg) {
  require_same_grid(u, cfg);
  EnergyDensity const d(u);
  OperatorIntegrals const I = operator_integrals(cfg.phi(), d.E(), d.weights(), 1.0);
  double const q = cfg.q(), p = cfg.p();
  double const A = weight_integral_a(u, cfg), B = weight_integral_b(u, cfg);
  return {I.I2 + (1.0 - q) * I.I1 - (p - q) * B,
          I.I2 - (p - 1.0) * I.I1 + cfg.lambda() * (p - q) * A};
}

struct NehariForms {
  double form202 = 0.0;  // lambda A_u eliminated
  double form203 = 0.0;  // B_u eliminated
};

inline NehariForms J_nehari_forms(Field const& u, ProblemConfig const& cfg) {
  require_same_grid(u, cfg);
  EnergyDensity const d(u);
  OperatorIntegrals const I = operator_integrals(cfg.phi(), d.E(), d.weights(), 1.0);
  double const cq = 1.0 / (cfg.q() + 1.0), cp = 1.0 / (cfg.p() + 1.0);
  double const A = weight_integral_a(u, cfg), B = weight_integral_b(u, cfg);
  return {I.I0 - cq * I.I1 + (cq - cp) * B, I.I0 - cp * I.I1 - cfg.lambda() * (cq - cp) * A};
}

// sqrt(sum_i g_i^2 / w_i): the discrete dual norm of a derivative vector.
inline double dual_norm(Field const& g) {
  CompensatedSum s;
  for (double v : g.values()) s.add(v * v);
  return std::sqrt(s.value() / g.grid().cell_volume());
}

}  // namespace nehari
