// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/fibering.hpp"
#include "nehari/gradcheck.hpp"
#include "nehari/grid.hpp"
#include "nehari/sobolev.hpp"
#include "nehari/thresholds.hpp"

namespace nehari {

struct SeedingError : std::runtime_error {
  SeedingError(std::string const& what, std::optional<FiberingDiagnosis> diag = std::nullopt)
      : std::runtime_error(what), diagnosis(std::move(diag)) {}
  std::optional<FiberingDiagnosis> diagnosis;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  int max_iterations = 5000;
  double armijo = 1e-4;
  double shrink = 0.5;
  double min_step = 1e-14;
  // Relative round-off level of J, and the multiple of it above which the
  // Armijo test is trusted.
  double energy_noise = 32.0 * std::numeric_limits<double>::epsilon();
  double resolvable = 100.0;
  int restarts = 3;
  int narrowings = 6;
  // Seed bump width as a fraction of the shortest side.
  double seed_width = 0.2;
  // Lower bound J >= delta_lambda checked on the minus branch when set.
  std::optional<double> delta_lambda;
};

inline Admissibility check_lambda(ProblemConfig const& cfg, ThresholdReport const& t) {
  return check_lambda(cfg.lambda(), t);
}

// Gaussian bump centred at the node where a (plus) or b (minus) is largest,
// first node in lexicographic order on ties; narrowed by halving sigma until
// the requested projection exists.
inline Field seed_field(ProblemConfig const& cfg, Branch branch, SolverOptions const& opt = {},
                        int first_narrowing = 0) {
  Grid const& g = cfg.grid();
  Field const& w = branch == Branch::plus ? cfg.a() : cfg.b();
  std::size_t best = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] > w[best]) best = i;
  }
  auto const c = g.coordinates(best);
  double sigma = opt.seed_width * *std::min_element(g.lengths().begin(), g.lengths().end());
  sigma *= std::pow(0.5, first_narrowing);
  std::optional<FiberingDiagnosis> last;
  for (int k = first_narrowing; k <= opt.narrowings; ++k, sigma *= 0.5) {
    Field u(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto const x = g.coordinates(i);
      double r2 = 0.0;
      for (std::size_t j = 0; j < g.dim(); ++j) r2 += (x[j] - c[j]) * (x[j] - c[j]);
      u[i] = std::exp(-r2 / (sigma * sigma));
    }
    try {
      project(u, cfg, branch);
      return u;
    } catch (ProjectionError const& e) {
      last = e.diagnosis;
    }
  }
  throw SeedingError("no seed admits a " + std::string(to_string(branch)) + " projection", last);
}

struct SolveChecks {
  bool converged = false;
  bool energy_sign = false;  // J < 0 (plus) or J > 0 (minus)
  bool gamma2_sign = false;  // gamma'' > 0 (plus) or < 0 (minus)
  bool constraint = false;   // relative |G| <= root tol on every iterate
  bool monotone = false;     // J(u_{k+1}) <= J(u_k) + 1e-14 (1 + |J(u_k)|)
  std::optional<bool> delta_lambda;  // J >= delta_lambda (minus branch)

  bool all() const {
    return converged && energy_sign && gamma2_sign && constraint && monotone &&
           delta_lambda.value_or(true);
  }
};

struct SolveReport {
  Branch branch = Branch::plus;
  NehariPoint point;
  int iterations = 0;
  int restarts = 0;
  double residual = 0.0;       // tangential dual norm at the final iterate
  double full_residual = 0.0;  // unprojected dual norm at the final iterate
  std::vector<double> residual_history;
  std::vector<double> full_residual_history;
  std::vector<double> energy_history;
  double max_constraint = 0.0;
  SolveChecks checks;
  std::string stop_reason;
  double wall_time = 0.0;  // seconds; not part of any JSON report
};

// H^1_0 Riesz map: solves (M + K) r = g with M the node quadrature mass.
class RieszMap {
 public:
  explicit RieszMap(Grid const& g) : H_(stiffness_matrix(g, 1.0)), ldlt_(H_) {
    if (ldlt_.info() != Eigen::Success) throw SolverError("Riesz operator factorization failed");
  }
  Vector solve(Vector const& g) const { return ldlt_.solve(g); }
  Vector apply(Vector const& u) const { return H_ * u; }

 private:
  SparseMatrix H_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

namespace detail {

enum class Outcome { converged, max_iterations, stagnated, projection_lost };

struct Gradient {
  Field g;
  double c = 0.0;  // radial coefficient <g, u> / <u, u>_H
  double residual = 0.0;
  double full_residual = 0.0;
};

inline Gradient evaluate_gradient(ProblemConfig const& cfg, RieszMap const& riesz, Field const& u) {
  Gradient out{J_grad(u, cfg)};
  Vector const ge = to_eigen(out.g.values());
  Vector const ue = to_eigen(u.values());
  Vector const Hu = riesz.apply(ue);
  out.c = ge.dot(ue) / ue.dot(Hu);
  out.residual = dual_norm(Field(cfg.grid(), from_eigen(ge - out.c * Hu)));
  out.full_residual = dual_norm(out.g);
  return out;
}

inline Outcome descend(ProblemConfig const& cfg, RieszMap const& riesz, NehariPoint x,
                       SolverOptions const& opt, SolveReport& rep) {
  double const tol = cfg.tol().residual;
  double alpha_prev = 0.5;
  rep.max_constraint = std::max(rep.max_constraint, x.constraint);
  Gradient grad = evaluate_gradient(cfg, riesz, x.u);
  for (int it = 0;; ++it) {
    rep.residual = grad.residual;
    rep.full_residual = grad.full_residual;
    rep.residual_history.push_back(grad.residual);
    rep.full_residual_history.push_back(grad.full_residual);
    rep.energy_history.push_back(x.energy);
    rep.iterations = it;
    rep.point = x;
    if (std::max(grad.residual, grad.full_residual) <= tol) return Outcome::converged;
    if (it >= opt.max_iterations) return Outcome::max_iterations;

    Vector const ge = to_eigen(grad.g.values());
    Vector const d = -(riesz.solve(ge) - grad.c * to_eigen(x.u.values()));
    double const slope = ge.dot(d);
    std::vector<double> const dir = from_eigen(d);
    double const noise = opt.energy_noise * (1.0 + std::abs(x.energy));
    double alpha = std::min(1.0, 2.0 * alpha_prev);
    bool accepted = false, projected_any = false;
    for (; alpha >= opt.min_step; alpha *= opt.shrink) {
      std::optional<NehariPoint> trial;
      try {
        trial = project(x.u.plus(alpha, dir), cfg, x.branch);
      } catch (ProjectionError const&) {
        continue;
      }
      projected_any = true;
      if (-alpha * slope > opt.resolvable * noise) {
        if (trial->energy > x.energy + opt.armijo * alpha * slope) continue;
        grad = evaluate_gradient(cfg, riesz, trial->u);
      } else {
        // The expected decrease is lost in the round-off of J: accept only
        // steps that keep J within that round-off and shrink the residual.
        if (trial->energy > x.energy + noise) continue;
        Gradient next = evaluate_gradient(cfg, riesz, trial->u);
        if (!(next.residual < grad.residual)) continue;
        grad = std::move(next);
      }
      x = std::move(*trial);
      accepted = true;
      break;
    }
    if (!accepted) return projected_any ? Outcome::stagnated : Outcome::projection_lost;
    alpha_prev = alpha;
    rep.max_constraint = std::max(rep.max_constraint, x.constraint);
  }
}

}  // namespace detail

// Projected descent on the requested branch: H^1 Riesz direction with the
// radial part removed, Armijo backtracking, reprojection of every trial.
inline SolveReport minimize_branch(ProblemConfig const& cfg, Branch branch, Field const& seed,
                                   SolverOptions const& opt = {}) {
  auto const start = std::chrono::steady_clock::now();
  RieszMap const riesz(cfg.grid());
  SolveReport rep;
  rep.branch = branch;
  detail::Outcome outcome = detail::Outcome::projection_lost;
  Field current = seed;
  for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
    rep.restarts = attempt;
    rep.residual_history.clear();
    rep.full_residual_history.clear();
    rep.energy_history.clear();
    rep.max_constraint = 0.0;
    outcome = detail::descend(cfg, riesz, project(current, cfg, branch), opt, rep);
    if (outcome != detail::Outcome::projection_lost) break;
    if (attempt == opt.restarts) {
      throw SolverError("projection lost after " + std::to_string(opt.restarts) + " restarts");
    }
    current = seed_field(cfg, branch, opt, attempt + 1);
  }
  switch (outcome) {
    case detail::Outcome::converged: rep.stop_reason = "converged"; break;
    case detail::Outcome::max_iterations: rep.stop_reason = "max_iterations"; break;
    case detail::Outcome::stagnated: rep.stop_reason = "line_search_stagnated"; break;
    case detail::Outcome::projection_lost: rep.stop_reason = "projection_lost"; break;
  }

  double const sign = branch == Branch::plus ? 1.0 : -1.0;
  SolveChecks& ch = rep.checks;
  ch.converged = outcome == detail::Outcome::converged;
  ch.energy_sign = sign * rep.point.energy < 0.0;
  ch.gamma2_sign = sign * rep.point.gamma2 > 0.0;
  ch.constraint = rep.max_constraint <= cfg.tol().root;
  ch.monotone = true;
  for (std::size_t k = 1; k < rep.energy_history.size(); ++k) {
    double const prev = rep.energy_history[k - 1];
    if (rep.energy_history[k] > prev + 1e-14 * (1.0 + std::abs(prev))) ch.monotone = false;
  }
  if (branch == Branch::minus && opt.delta_lambda) {
    ch.delta_lambda = rep.point.energy >= *opt.delta_lambda - 1e-9;
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline SolveReport solve_branch(ProblemConfig const& cfg, Branch branch, SolverOptions const& opt = {}) {
  return minimize_branch(cfg, branch, seed_field(cfg, branch, opt), opt);
}

struct BothReport {
  std::optional<SolveReport> minus;
  std::optional<SolveReport> plus;
  std::string minus_error;
  std::string plus_error;
  bool sign_ordering = false;  // J(plus) < 0 < J(minus)

  bool ok() const {
    return minus && plus && sign_ordering && minus->checks.all() && plus->checks.all();
  }
};

inline BothReport solve_both(ProblemConfig const& cfg, SolverOptions const& opt = {}) {
  BothReport out;
  auto run = [&](Branch b, std::optional<SolveReport>& slot, std::string& err) {
    try {
      slot = solve_branch(cfg, b, opt);
    } catch (SeedingError const& e) {
      err = e.what();
    } catch (SolverError const& e) {
      err = e.what();
    } catch (ProjectionError const& e) {
      err = e.what();
    } catch (BracketError const& e) {
      err = e.what();
    }
  };
  run(Branch::minus, out.minus, out.minus_error);
  run(Branch::plus, out.plus, out.plus_error);
  if (out.minus && out.plus) {
    out.sign_ordering = out.plus->point.energy < 0.0 && 0.0 < out.minus->point.energy;
  }
  return out;
}

struct MultistartReport {
  std::vector<double> energies;
  std::vector<bool> converged;
  double spread = 0.0;  // (max - min) / max |J|
  bool consistent = false;
  std::string note;
};

// Runs the branch from `starts` perturbed copies of its seed. Energies that
// disagree by more than `rel_tol` are reported as distinct local minimizers.
inline MultistartReport multistart(ProblemConfig const& cfg, Branch branch, int starts,
                                   std::uint64_t seed, SolverOptions const& opt = {},
                                   double amplitude = 0.2, double rel_tol = 1e-6) {
  MultistartReport out;
  Field const base = seed_field(cfg, branch, opt);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < starts; ++s) {
    Field start = base;
    for (double& v : start.values()) v *= 1.0 + amplitude * (2.0 * unit_uniform(rng) - 1.0);
    SolveReport const r = minimize_branch(cfg, branch, start, opt);
    out.energies.push_back(r.point.energy);
    out.converged.push_back(r.checks.converged);
  }
  auto const [lo, hi] = std::minmax_element(out.energies.begin(), out.energies.end());
  double scale = 0.0;
  for (double e : out.energies) scale = std::max(scale, std::abs(e));
  out.spread = scale > 0.0 ? (*hi - *lo) / scale : 0.0;
  out.consistent = out.spread <= rel_tol;
  if (!out.consistent) out.note = "distinct local minimizers: energies differ beyond tolerance";
  return out;
}

}  // namespace nehari
