// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/grid.hpp"

namespace nehari {

// Uniform double in [0, 1) from the top 53 bits; unlike the std distributions
// this is identical across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Field with entries uniform in [-amplitude, amplitude].
inline Field random_field(Grid const& g, std::mt19937_64& rng, double amplitude = 1.0) {
  Field f(g);
  for (double& v : f.values()) v = amplitude * (2.0 * unit_uniform(rng) - 1.0);
  return f;
}

struct DirectionCheck {
  double analytic = 0.0;     // <J_grad(u), v>
  double fd = 0.0;           // central difference of J along v
  double error = 0.0;        // |analytic - fd| / (1 + |fd|)
};

struct GradientCheck {
  double step = 0.0;
  std::vector<DirectionCheck> directions;
  double max_error = 0.0;
};

// Compares <J_grad(u), v> against central differences of J in random
// directions v with entries in [-1, 1], step 1e-5 (1 + max |u|).
inline GradientCheck gradient_check(Field const& u, ProblemConfig const& cfg, int directions,
                                    std::mt19937_64& rng, double step_scale = 1e-5) {
  GradientCheck out;
  out.step = step_scale * (1.0 + u.max_abs());
  Field const g = J_grad(u, cfg);
  for (int k = 0; k < directions; ++k) {
    Field const v = random_field(cfg.grid(), rng);
    DirectionCheck d;
    CompensatedSum dot;
    for (std::size_t i = 0; i < u.size(); ++i) dot.add(g[i] * v[i]);
    d.analytic = dot.value();
    d.fd = (J(u.plus(out.step, v.values()), cfg) - J(u.plus(-out.step, v.values()), cfg)) /
           (2.0 * out.step);
    d.error = std::abs(d.analytic - d.fd) / (1.0 + std::abs(d.fd));
    out.max_error = std::max(out.max_error, d.error);
    out.directions.push_back(d);
  }
  return out;
}

}  // namespace nehari
