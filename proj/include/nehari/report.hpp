// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "nehari/config.hpp"
#include "nehari/fibering.hpp"
#include "nehari/gradcheck.hpp"
#include "nehari/hypotheses.hpp"
#include "nehari/solver.hpp"
#include "nehari/sobolev.hpp"
#include "nehari/thresholds.hpp"
#include "nehari/weights.hpp"

namespace nehari {

using Json = nlohmann::ordered_json;

// Non-finite values become null so every report stays strict JSON.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(PhiSpec const& spec) {
  Json j;
  j["kind"] = std::string(to_string(spec.kind));
  switch (spec.kind) {
    case PhiKind::constant: j["c"] = spec.c; break;
    case PhiKind::stuart_example: j["A"] = spec.A; break;
    case PhiKind::tabulated: j["file"] = spec.file; break;
  }
  return j;
}

inline Json to_json(HypothesisReport const& r) {
  Json j;
  j["q"] = r.q;
  j["p"] = r.p;
  j["kind"] = std::string(to_string(r.kind));
  j["plan"] = {{"s_min_positive", r.plan.s_min_positive},
               {"s_max", r.plan.s_max},
               {"count", r.plan.count},
               {"safety", r.plan.safety},
               {"tail_tol", r.plan.tail_tol}};
  Json checks = Json::array();
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    checks.push_back({{"hypothesis", "phi" + std::to_string(i + 1)},
                      {"pass", r.checks[i].pass},
                      {"margin", number(r.checks[i].margin)},
                      {"witness_s", number(r.checks[i].witness_s)}});
  }
  j["checks"] = checks;
  Json rho;
  for (std::size_t i = 0; i < r.rho.size(); ++i) rho["rho" + std::to_string(i)] = number(r.rho[i]);
  j["constants"] = rho;
  j["phi_inf"] = number(r.phi_inf);
  j["all_pass"] = r.all_pass();
  return j;
}

inline Json to_json(SobolevEstimates const& sob) {
  Json j = Json::array();
  for (auto const& [i, e] : sob) {
    j.push_back({{"exponent", i},
                 {"S", number(e.value)},
                 {"label", "S_i (discrete estimate)"},
                 {"method", e.method},
                 {"iterations", e.iterations},
                 {"converged", e.converged}});
  }
  return j;
}

inline Json to_json(Weight const& w) {
  return {{"sup_norm", w.sup_norm}, {"sign_changing", w.sign_changing}, {"warning", w.warning}};
}

inline Json to_json(ThresholdReport const& t) {
  Json in = {{"q", t.inputs.q},       {"p", t.inputs.p},         {"rho0", t.inputs.rho0},
             {"rho1", t.inputs.rho1}, {"rho3", t.inputs.rho3},   {"rho5", t.inputs.rho5},
             {"a_sup", t.inputs.a_sup}, {"b_sup", t.inputs.b_sup}, {"S_q_plus_1", t.inputs.S_q1},
             {"S_p_plus_1", t.inputs.S_p1}};
  return {{"inputs", in},
          {"provenance", "rho from sampled phi (safety-shrunk); S from discrete estimates"},
          {"kappa", number(t.kappa)},
          {"lambda1", number(t.lambda1)},
          {"lambda2", number(t.lambda2)},
          {"lambda0", number(t.lambda0)},
          {"c1", number(t.c1)},
          {"delta", number(t.delta)}};
}

inline Json to_json(FiberingDiagnosis const& d) {
  Json j;
  j["A_u"] = number(d.A);
  j["B_u"] = number(d.B);
  j["E_u"] = number(d.E);
  j["lambda_A_u"] = number(d.lambda_A);
  j["case"] = std::string(to_string(d.kind));
  j["t_tilde"] = d.t_tilde ? number(*d.t_tilde) : Json(nullptr);
  j["m_at_t_tilde"] = d.m_tilde ? number(*d.m_tilde) : Json(nullptr);
  Json roots = Json::array();
  for (auto const& r : d.roots) {
    roots.push_back({{"t", number(r.t)},
                     {"gamma2_sign", r.gamma2_sign > 0 ? "+" : (r.gamma2_sign < 0 ? "-" : "0")},
                     {"bracket_width", number(r.width)},
                     {"relative_residual", number(r.relative_residual)}});
  }
  j["roots"] = roots;
  if (d.t_max) {
    j["t_max"] = number(d.t_max->t);
    j["h_at_t_max"] = number(d.t_max->h);
    j["h_critical_points"] = d.t_max->critical_points;
  } else {
    j["t_max"] = nullptr;
    j["h_at_t_max"] = nullptr;
  }
  return j;
}

inline Json to_json(Norms const& n) { return {{"l2", number(n.l2)}, {"grad_l2", number(n.grad_l2)}}; }

inline Json to_json(NehariPoint const& x) {
  Json const n = to_json(norms(x.u));
  return {{"branch", std::string(to_string(x.branch))},
          {"energy", number(x.energy)},
          {"constraint", number(x.constraint)},
          {"gamma2", number(x.gamma2)},
          {"t_star", number(x.t_star)},
          {"l2_norm", n["l2"]},
          {"grad_l2_norm", n["grad_l2"]},
          {"max_abs", number(x.u.max_abs())}};
}

inline Json to_json(SolveReport const& r) {
  Json checks = {{"converged", r.checks.converged},
                 {"energy_sign", r.checks.energy_sign},
                 {"gamma2_sign", r.checks.gamma2_sign},
                 {"constraint", r.checks.constraint},
                 {"monotone_energy", r.checks.monotone}};
  checks["delta_lambda_bound"] = r.checks.delta_lambda ? Json(*r.checks.delta_lambda) : Json(nullptr);
  checks["all"] = r.checks.all();
  return {{"branch", std::string(to_string(r.branch))},
          {"stop_reason", r.stop_reason},
          {"iterations", r.iterations},
          {"restarts", r.restarts},
          {"residual", number(r.residual)},
          {"full_residual", number(r.full_residual)},
          {"max_constraint", number(r.max_constraint)},
          {"point", to_json(r.point)},
          {"checks", checks}};
}

inline Json to_json(MultistartReport const& m) {
  Json e = Json::array();
  for (double v : m.energies) e.push_back(number(v));
  Json c = Json::array();
  for (bool v : m.converged) c.push_back(v);
  return {{"energies", e}, {"converged", c}, {"relative_spread", number(m.spread)},
          {"consistent", m.consistent}, {"note", m.note}};
}

inline Json to_json(GradientCheck const& g) {
  Json dirs = Json::array();
  for (auto const& d : g.directions) {
    dirs.push_back({{"analytic", number(d.analytic)}, {"finite_difference", number(d.fd)},
                    {"relative_error", number(d.error)}});
  }
  return {{"step", number(g.step)}, {"max_relative_error", number(g.max_error)}, {"directions", dirs}};
}

inline void write_json(std::string const& path, Json const& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace nehari
