// SPDX-License-Identifier: Apache-2.0
// Problem builders shared by the unit tests and the acceptance binary.
#pragma once

#include <random>

#include "nehari/nehari.hpp"

namespace nehari::testing {

inline GridSpec cube_spec(std::size_t n) {
  GridSpec g;
  g.n = {n, n, n};
  g.L = {1.0, 1.0, 1.0};
  return g;
}

inline ProblemConfig make_problem(std::size_t n, PhiModel phi, double lambda, double q = 0.5,
                                  double p = 3.0) {
  GridSpec const spec = cube_spec(n);
  Grid const g(spec.n, spec.L);
  return ProblemConfig(std::move(phi), make_weight(default_weight_a(spec), g).values,
                       make_weight(default_weight_b(spec), g).values, q, p, lambda);
}

inline ProblemConfig with_weights(ProblemConfig const& cfg, Field a, Field b) {
  return ProblemConfig(cfg.phi(), std::move(a), std::move(b), cfg.q(), cfg.p(), cfg.lambda(), cfg.tol());
}

inline Field constant_field(Grid const& g, double v) {
  Field f(g);
  for (double& x : f.values()) x = v;
  return f;
}

// Thresholds for the problem's phi, exponents and weights.
inline ThresholdReport thresholds_for(ProblemConfig const& cfg) {
  HypothesisReport const hyp = verify_hypotheses(cfg.phi(), cfg.q(), cfg.p());
  SobolevEstimates sob;
  for (double i : {cfg.q() + 1.0, cfg.p() + 1.0}) sob[i] = estimate_sobolev(cfg.grid(), i);
  return compute_thresholds(hyp, sob, cfg.a().max_abs(), cfg.b().max_abs());
}

// Random field with log-uniform amplitude in [1e-2, 1e1] so rays of many
// shapes and scales are exercised.
inline Field random_scaled_field(Grid const& g, std::mt19937_64& rng) {
  double const amp = std::pow(10.0, -2.0 + 3.0 * unit_uniform(rng));
  return random_field(g, rng, amp);
}

// Sum of three Gaussian bumps with random signs, centres and widths.
inline Field random_smooth_field(Grid const& g, std::mt19937_64& rng) {
  Field u(g);
  for (int b = 0; b < 3; ++b) {
    double const amp = 2.0 * unit_uniform(rng) - 1.0;
    double const sigma = 0.1 + 0.3 * unit_uniform(rng);
    std::vector<double> c(g.dim());
    for (std::size_t k = 0; k < g.dim(); ++k) c[k] = g.length(k) * unit_uniform(rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto const x = g.coordinates(i);
      double r2 = 0.0;
      for (std::size_t k = 0; k < g.dim(); ++k) r2 += (x[k] - c[k]) * (x[k] - c[k]);
      u[i] += amp * std::exp(-r2 / (sigma * sigma));
    }
  }
  return u;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo * std::pow(hi / lo, unit_uniform(rng));
}

}  // namespace nehari::testing
