// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "nehari/config.hpp"
#include "nehari/energy.hpp"
#include "nehari/fibering.hpp"
#include "nehari/gradcheck.hpp"
#include "nehari/hypotheses.hpp"
#include "nehari/report.hpp"
#include "nehari/solver.hpp"
#include "nehari/sobolev.hpp"
#include "nehari/thresholds.hpp"
#include "nehari/weights.hpp"

namespace nehari::cli {

enum Exit : int { ok = 0, config_error = 1, invariant_failure = 2 };

struct Options {
  std::string command;
  std::filesystem::path config;  // empty: all defaults
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> field;
  bool force = false;
};

// Invariant failure raised by a subcommand after its report was written.
struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem data shared by the subcommands; thresholds are present when the
// phi hypotheses they need hold.
struct Context {
  RunConfig rc;
  Grid grid;
  PhiModel phi;
  Weight a;
  Weight b;
  HypothesisReport hypotheses;
  SobolevEstimates sobolev;
  std::optional<ThresholdReport> thresholds;
  std::string threshold_error;
  double lambda = 0.0;
  std::optional<Admissibility> verdict;

  ProblemConfig problem() const {
    return ProblemConfig(phi, a.values, b.values, rc.q, rc.p, lambda, rc.tol);
  }
};

inline Context build_context(RunConfig const& rc, std::ostream& log) {
  Grid grid = rc.make_grid();
  if (grid.dim() <= 2) log << "warning: N <= 2, the critical exponent 2* is treated as +inf\n";
  Context ctx{rc, grid, make_phi(rc.phi), make_weight(rc.a, grid), make_weight(rc.b, grid)};
  if (!ctx.a.warning.empty()) log << "warning: weight a: " << ctx.a.warning << '\n';
  if (!ctx.b.warning.empty()) log << "warning: weight b: " << ctx.b.warning << '\n';
  ctx.hypotheses = verify_hypotheses(ctx.phi, rc.q, rc.p, rc.phi.plan);
  for (double i : {rc.q + 1.0, 2.0, rc.p + 1.0}) ctx.sobolev[i] = estimate_sobolev(grid, i);
  try {
    ctx.thresholds = compute_thresholds(ctx.hypotheses, ctx.sobolev, ctx.a.sup_norm, ctx.b.sup_norm);
  } catch (ConfigError const& e) {
    ctx.threshold_error = e.what();
  }
  if (rc.lambda.automatic) {
    if (!ctx.thresholds) {
      throw InvariantFailure("lambda = auto needs thresholds: " + ctx.threshold_error);
    }
    ctx.lambda = rc.lambda.value * ctx.thresholds->lambda0;
  } else {
    ctx.lambda = rc.lambda.value;
  }
  if (ctx.thresholds) ctx.verdict = check_lambda(ctx.lambda, *ctx.thresholds);
  return ctx;
}

inline Json problem_json(Context const& ctx) {
  Json grid;
  grid["dim"] = ctx.grid.dim();
  grid["n"] = ctx.grid.node_counts();
  grid["L"] = ctx.grid.lengths();
  Json j;
  j["phi"] = to_json(ctx.rc.phi);
  j["grid"] = grid;
  j["q"] = ctx.rc.q;
  j["p"] = ctx.rc.p;
  j["lambda_spec"] = (ctx.rc.lambda.automatic ? "auto:" : "") + [&] {
    std::ostringstream s;
    s << std::setprecision(17) << ctx.rc.lambda.value;
    return s.str();
  }();
  j["lambda"] = number(ctx.lambda);
  j["verdict"] = ctx.verdict ? Json(std::string(to_string(*ctx.verdict))) : Json(nullptr);
  j["weights"] = {{"a", to_json(ctx.a)}, {"b", to_json(ctx.b)}};
  return j;
}

inline std::filesystem::path output_dir(Options const& opt, RunConfig const& rc) {
  std::filesystem::path dir = opt.out ? *opt.out : std::filesystem::path(rc.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline int verify_phi(Options const& opt, RunConfig const& rc, std::ostream& log) {
  HypothesisReport const r = verify_hypotheses(make_phi(rc.phi), rc.q, rc.p, rc.phi.plan);
  Json j;
  j["command"] = "verify-phi";
  j["phi"] = to_json(rc.phi);
  j["report"] = to_json(r);
  write_json((output_dir(opt, rc) / "hypotheses.json").string(), j);
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    log << "phi" << i + 1 << (r.checks[i].pass ? " pass" : " FAIL") << '\n';
  }
  return r.all_pass() ? ok : invariant_failure;
}

inline int thresholds(Options const& opt, Context const& ctx, std::ostream& log) {
  Json j;
  j["command"] = "thresholds";
  j["problem"] = problem_json(ctx);
  j["hypotheses"] = to_json(ctx.hypotheses);
  j["sobolev"] = to_json(ctx.sobolev);
  if (ctx.thresholds) {
    j["thresholds"] = to_json(*ctx.thresholds);
    j["delta_lambda"] = number(ctx.thresholds->delta_lambda(ctx.lambda));
  } else {
    j["thresholds"] = nullptr;
    j["error"] = ctx.threshold_error;
  }
  write_json((output_dir(opt, ctx.rc) / "thresholds.json").string(), j);
  if (!ctx.thresholds) {
    log << "thresholds unavailable: " << ctx.threshold_error << '\n';
    return invariant_failure;
  }
  log << "lambda0 = " << ctx.thresholds->lambda0 << ", lambda = " << ctx.lambda << " ("
      << to_string(*ctx.verdict) << ")\n";
  return ok;
}

inline int fibering(Options const& opt, Context const& ctx, std::ostream& log) {
  ProblemConfig const cfg = ctx.problem();
  Field u = [&] {
    if (opt.field) {
      Field f = [&] {
        try {
          return read_field_csv(opt.field->string());
        } catch (std::runtime_error const& e) {
          throw ConfigError(e.what());
        }
      }();
      if (f.grid() != cfg.grid()) throw ConfigError(opt.field->string() + ": field grid does not match the config grid");
      return f;
    }
    try {
      return seed_field(cfg, Branch::plus);
    } catch (SeedingError const&) {
      return seed_field(cfg, Branch::minus);
    }
  }();
  Ray const ray(u, cfg);
  FiberingDiagnosis const d = classify(ray);
  bool roots_ok = true;
  for (auto const& r : d.roots) roots_ok = roots_ok && r.relative_residual <= cfg.tol().root;

  Json j;
  j["command"] = "fibering";
  j["problem"] = problem_json(ctx);
  j["source"] = opt.field ? "field" : "seed";
  j["diagnosis"] = to_json(d);
  j["roots_within_tolerance"] = roots_ok;
  auto const dir = output_dir(opt, ctx.rc);
  write_json((dir / "fibering.json").string(), j);

  std::ofstream csv(dir / "fibering_samples.csv");
  csv << "t,gamma,gamma_prime,gamma_second,m,eta\n" << std::setprecision(17);
  FiberingSampling const& s = ctx.rc.sampling;
  for (std::size_t k = 0; k < s.count; ++k) {
    double const t = s.t_min * std::pow(s.t_max / s.t_min, double(k) / double(s.count - 1));
    csv << t << ',' << ray.gamma(t) << ',' << ray.gamma_prime(t) << ',' << ray.gamma_second(t) << ','
        << ray.m(t) << ',' << ray.eta(t) << '\n';
  }
  log << "case " << to_string(d.kind) << ", " << d.roots.size() << " root(s)\n";
  return roots_ok ? ok : invariant_failure;
}

inline void write_history(std::filesystem::path const& path, SolveReport const& r) {
  std::ofstream out(path);
  out << "iteration,energy,residual,full_residual\n" << std::setprecision(17);
  for (std::size_t k = 0; k < r.energy_history.size(); ++k) {
    out << k << ',' << r.energy_history[k] << ',' << r.residual_history[k] << ','
        << r.full_residual_history[k] << '\n';
  }
}

inline int solve(Options const& opt, Context const& ctx, std::ostream& log) {
  if (!ctx.verdict && !opt.force) {
    log << "cannot judge lambda without thresholds (" << ctx.threshold_error << "); use --force\n";
    return invariant_failure;
  }
  if (ctx.verdict == Admissibility::inadmissible && !opt.force) {
    log << "lambda = " << ctx.lambda << " is inadmissible (lambda0 = " << ctx.thresholds->lambda0
        << "); use --force to run anyway\n";
    return invariant_failure;
  }
  ProblemConfig const cfg = ctx.problem();
  SolverOptions so;
  so.max_iterations = ctx.rc.max_iterations;
  so.restarts = ctx.rc.restarts;
  if (ctx.thresholds && ctx.verdict == Admissibility::admissible) {
    so.delta_lambda = ctx.thresholds->delta_lambda(ctx.lambda);
  }
  BothReport const both = solve_both(cfg, so);
  std::optional<MultistartReport> ms;
  if (both.plus && ctx.rc.multistart > 0) {
    ms = multistart(cfg, Branch::plus, ctx.rc.multistart, ctx.rc.seed, so);
  }

  auto const dir = output_dir(opt, ctx.rc);
  Json j;
  j["command"] = "solve";
  j["problem"] = problem_json(ctx);
  if (ctx.thresholds) {
    j["thresholds"] = to_json(*ctx.thresholds);
    j["delta_lambda"] = number(ctx.thresholds->delta_lambda(ctx.lambda));
  }
  auto branch_json = [&](std::optional<SolveReport> const& r, std::string const& err) {
    return r ? to_json(*r) : Json{{"error", err}};
  };
  j["minus"] = branch_json(both.minus, both.minus_error);
  j["plus"] = branch_json(both.plus, both.plus_error);
  j["sign_ordering"] = both.sign_ordering;
  j["ground_state"] = both.sign_ordering ? Json("plus") : Json(nullptr);
  j["multistart_plus"] = ms ? to_json(*ms) : Json(nullptr);
  write_json((dir / "solve.json").string(), j);
  if (both.minus) {
    write_field_csv((dir / "u_minus.csv").string(), both.minus->point.u);
    write_history(dir / "history_minus.csv", *both.minus);
  }
  if (both.plus) {
    write_field_csv((dir / "u_plus.csv").string(), both.plus->point.u);
    write_history(dir / "history_plus.csv", *both.plus);
  }

  for (auto const* r : {&both.minus, &both.plus}) {
    if (!*r) continue;
    log << to_string((*r)->branch) << ": J = " << (*r)->point.energy << ", residual = "
        << (*r)->full_residual << ", iterations = " << (*r)->iterations << ", "
        << (*r)->stop_reason << ", wall time " << (*r)->wall_time << " s\n";
  }
  if (!both.minus_error.empty()) log << "minus branch failed: " << both.minus_error << '\n';
  if (!both.plus_error.empty()) log << "plus branch failed: " << both.plus_error << '\n';
  if (ms && !ms->consistent) log << "multistart: " << ms->note << '\n';
  return both.ok() ? ok : invariant_failure;
}

inline int gradcheck(Options const& opt, Context const& ctx, std::ostream& log) {
  ProblemConfig const cfg = ctx.problem();
  std::mt19937_64 rng(ctx.rc.seed);
  Field const u = random_field(cfg.grid(), rng);
  GradientCheck const g = gradient_check(u, cfg, ctx.rc.gradcheck_directions, rng);
  double const tol = 1e-6;
  Json j;
  j["command"] = "gradcheck";
  j["problem"] = problem_json(ctx);
  j["seed"] = ctx.rc.seed;
  j["tolerance"] = tol;
  j["check"] = to_json(g);
  j["pass"] = g.max_error <= tol;
  write_json((output_dir(opt, ctx.rc) / "gradcheck.json").string(), j);
  log << "max relative error " << g.max_error << '\n';
  return g.max_error <= tol ? ok : invariant_failure;
}

// Dispatches one subcommand. Exit codes: 0 success, 1 config error,
// 2 invariant failure.
inline int run(Options const& opt, std::ostream& log = std::cerr) {
  try {
    RunConfig const rc = opt.config.empty() ? parse_config("") : load_config(opt.config);
    if (opt.command == "verify-phi") return verify_phi(opt, rc, log);
    Context const ctx = build_context(rc, log);
    if (opt.command == "thresholds") return thresholds(opt, ctx, log);
    if (opt.command == "fibering") return fibering(opt, ctx, log);
    if (opt.command == "solve") return solve(opt, ctx, log);
    if (opt.command == "gradcheck") return gradcheck(opt, ctx, log);
    log << "unknown command '" << opt.command << "'\n";
    return config_error;
  } catch (ConfigError const& e) {
    log << "config error: " << e.what() << '\n';
    return config_error;
  } catch (std::exception const& e) {
    log << "error: " << e.what() << '\n';
    return invariant_failure;
  }
}

}  // namespace nehari::cli
