// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/numeric.hpp"

namespace nehari {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

// K with u^T K v = grad_inner(u, v): the (2N+1)-point Dirichlet stencil scaled
// by the cell volume.
inline SparseMatrix stiffness_matrix(Grid const& g, double mass_shift = 0.0) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.size() * (2 * g.dim() + 1));
  double const W = g.cell_volume();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double diag = mass_shift * W;
    for (std::size_t k = 0; k < g.dim(); ++k) {
      double const c = W / (g.spacing(k) * g.spacing(k));
      diag += 2.0 * c;
      std::size_t const pos = g.index_along(i, k);
      if (pos > 0) entries.emplace_back(int(i), int(i - g.stride(k)), -c);
      if (pos + 1 < g.nodes(k)) entries.emplace_back(int(i), int(i + g.stride(k)), -c);
    }
    entries.emplace_back(int(i), int(i), diag);
  }
  SparseMatrix K(int(g.size()), int(g.size()));
  K.setFromTriplets(entries.begin(), entries.end());
  return K;
}

inline Vector to_eigen(std::vector<double> const& v) {
  return Eigen::Map<Vector const>(v.data(), Eigen::Index(v.size()));
}

inline std::vector<double> from_eigen(Vector const& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

struct SobolevEstimate {
  double exponent = 2.0;
  double value = 0.0;  // S_i, best constant in ||u||_i <= S_i ||grad u||_2
  std::string method;
  int iterations = 0;
  bool converged = false;
};

using SobolevEstimates = std::map<double, SobolevEstimate>;

struct SobolevOptions {
  double rel_tol = 1e-8;
  int max_iterations = 20000;
};

// Maximizes ||u||_i over ||grad u||_2 = 1 by the nonlinear inverse power
// iteration u <- K^-1 (w |u|^{i-2} u), renormalized after every step. Each
// step increases ||u||_i because |u|^i is convex.
inline SobolevEstimate estimate_sobolev(Grid const& grid, double i, SobolevOptions const& opt = {}) {
  double const crit = grid.critical_exponent();
  if (grid.dim() > 2) {
    if (!(i > 1.0 && i < crit)) {
      throw DomainError("Sobolev exponent must lie in (1, " + std::to_string(crit) + ")");
    }
  } else if (!(i >= 1.0)) {
    throw DomainError("Sobolev exponent must be >= 1");
  }

  SparseMatrix const K = stiffness_matrix(grid);
  Eigen::SimplicialLDLT<SparseMatrix> solver(K);
  if (solver.info() != Eigen::Success) throw std::runtime_error("stiffness factorization failed");

  // Start from a positive product of parabolas, not the exact eigenvector.
  Field u(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    auto const x = grid.coordinates(n);
    double v = 1.0;
    for (std::size_t k = 0; k < grid.dim(); ++k) v *= x[k] * (grid.length(k) - x[k]);
    u[n] = v;
  }
  auto const normalize = [&](Field& f) {
    double const g = std::sqrt(grad_inner(f, f));
    for (double& v : f.values()) v /= g;
  };
  normalize(u);

  SobolevEstimate est;
  est.exponent = i;
  est.method = "nonlinear inverse power iteration";
  double ratio = lp_norm(u, i);
  double const W = grid.cell_volume();
  std::vector<double> rhs(grid.size());
  for (int it = 1; it <= opt.max_iterations; ++it) {
    for (std::size_t n = 0; n < grid.size(); ++n) rhs[n] = W * signed_power(u[n], i - 1.0);
    u.values() = from_eigen(solver.solve(to_eigen(rhs)));
    normalize(u);
    double const next = lp_norm(u, i);
    est.iterations = it;
    bool const done = std::abs(next - ratio) <= opt.rel_tol * next;
    ratio = next;
    if (done) {
      est.converged = true;
      break;
    }
  }
  est.value = ratio;
  return est;
}

}  // namespace nehari
