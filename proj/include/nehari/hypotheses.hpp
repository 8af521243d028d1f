// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nehari/numeric.hpp"
#include "nehari/phi.hpp"

namespace nehari {

// Sample plan for certifying the structural hypotheses on phi: s = 0 plus
// (count - 1) log-spaced points in [s_min_positive, s_max].
struct SamplePlan {
  double s_min_positive = 1e-6;
  double s_max = 1e6;
  std::size_t count = 4096;
  // Multiplicative slack applied to every reported constant, toward the
  // conservative side (lower bounds shrink, upper bounds grow).
  double safety = 1e-3;
  // Tail flatness tolerance, relative to 1 + |value at s_max|.
  double tail_tol = 1e-6;

  std::vector<double> points() const {
    std::vector<double> s(count);
    s[0] = 0.0;
    double const lo = std::log(s_min_positive);
    double const hi = std::log(s_max);
    for (std::size_t k = 1; k < count; ++k) {
      double const frac = count > 2 ? double(k - 1) / double(count - 2) : 1.0;
      s[k] = std::exp(lo + frac * (hi - lo));
    }
    s[count - 1] = s_max;
    return s;
  }
};

struct HypothesisCheck {
  bool pass = false;
  // Worst-case slack on the samples; positive iff the hypothesis holds there.
  double margin = 0.0;
  // Sample that attains the worst case (for phi6 the s = t^2 of the worst
  // second difference).
  double witness_s = 0.0;
};

struct HypothesisReport {
  double q = 0.0;
  double p = 0.0;
  PhiKind kind = PhiKind::constant;
  SamplePlan plan;
  std::array<HypothesisCheck, 7> checks{};  // (phi_1) ... (phi_7)
  std::array<double, 7> rho{};              // rho_0 ... rho_6
  double phi_inf = 0.0;

  bool passes(int hypothesis) const { return checks.at(hypothesis - 1).pass; }
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](HypothesisCheck const& c) { return c.pass; });
  }
};

namespace detail {

struct Extremum {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double argmin = 0.0;
  double argmax = 0.0;
  bool finite = true;

  void add(double s, double v) {
    if (!std::isfinite(v)) finite = false;
    if (v < min) { min = v; argmin = s; }
    if (v > max) { max = v; argmax = s; }
  }
};

}  // namespace detail

inline HypothesisReport verify_hypotheses(PhiModel const& model, double q, double p,
                                          SamplePlan const& plan = {}) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
  if (!(p > 1.0)) throw DomainError("p must be > 1");
  if (plan.count < 3 || !(plan.s_max > plan.s_min_positive) || !(plan.s_min_positive > 0.0)) {
    throw DomainError("sample plan needs >= 3 points and 0 < s_min < s_max");
  }

  HypothesisReport report;
  report.q = q;
  report.p = p;
  report.kind = model.kind();
  report.plan = plan;

  double const lo = 1.0 - plan.safety;
  double const hi = 1.0 + plan.safety;
  std::vector<double> const s = plan.points();

  detail::Extremum phi, h2, h3, h4, h5;
  for (double si : s) {
    PhiValues const v = evaluate(model, si);
    phi.add(si, v.phi);
    h2.add(si, std::abs(v.phi1) * si + std::abs(v.phi2) * si * si);
    h3.add(si, (1.0 - q) * v.phi + 2.0 * v.phi1 * si);
    h4.add(si, (p - 1.0) * v.phi - 2.0 * v.phi1 * si);
    h5.add(si, (1.0 - q) * (1.0 - p) * v.phi + 2.0 * (4.0 - p - q) * v.phi1 * si +
                   4.0 * v.phi2 * si * si);
  }
  PhiValues const tail = evaluate(model, plan.s_max);
  PhiValues const half_tail = evaluate(model, 0.5 * plan.s_max);

  auto& rho = report.rho;
  auto& c = report.checks;

  // (phi_1): 0 < max{(q+1)/2, 2/(p+1)} rho_1 < rho_0 <= phi <= rho_1.
  rho[0] = phi.min * lo;
  rho[1] = phi.max * hi;
  double const ratio = std::max((q + 1.0) / 2.0, 2.0 / (p + 1.0));
  c[0].margin = rho[0] - ratio * rho[1];
  c[0].witness_s = c[0].margin > 0.0 ? phi.argmin : phi.argmax;
  c[0].pass = phi.finite && phi.min > 0.0 && c[0].margin > 0.0;

  // (phi_2): |phi'| s + |phi''| s^2 bounded; the tail must have flattened.
  rho[2] = h2.max > 0.0 ? h2.max * hi : plan.safety;
  {
    double const g_end = std::abs(tail.phi1) * plan.s_max +
                         std::abs(tail.phi2) * plan.s_max * plan.s_max;
    double const s2 = 0.5 * plan.s_max;
    double const g_half = std::abs(half_tail.phi1) * s2 + std::abs(half_tail.phi2) * s2 * s2;
    c[1].margin = plan.tail_tol * (1.0 + std::abs(g_end)) - std::abs(g_end - g_half);
    c[1].witness_s = h2.argmax;
    c[1].pass = h2.finite && c[1].margin > 0.0;
  }

  // (phi_3): 0 < rho_3 <= (1-q) phi + 2 phi' s <= rho_4.
  rho[3] = h3.min * lo;
  rho[4] = h3.max * hi;
  c[2].margin = h3.min;
  c[2].witness_s = h3.argmin;
  c[2].pass = h3.finite && h3.min > 0.0;

  // (phi_4): rho_5 + 2 phi' s <= (p-1) phi.
  rho[5] = h4.min * lo;
  c[3].margin = h4.min;
  c[3].witness_s = h4.argmin;
  c[3].pass = h4.finite && h4.min > 0.0;

  // (phi_5): (1-q)(1-p) phi + 2(4-p-q) phi' s + 4 phi'' s^2 <= -rho_6 < 0.
  rho[6] = -h5.max * lo;
  c[4].margin = -h5.max;
  c[4].witness_s = h5.argmax;
  c[4].pass = h5.finite && h5.max < 0.0;

  // (phi_6): t -> Phi(t^2) strictly convex, via second divided differences on
  // t_k = sqrt(s_k).
  {
    double worst = std::numeric_limits<double>::infinity();
    double witness = 0.0;
    bool finite = true;
    std::vector<double> t(s.size()), f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      t[k] = std::sqrt(s[k]);
      f[k] = evaluate(model, s[k]).Phi;
      if (!std::isfinite(f[k])) finite = false;
    }
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
      double const left = (f[k] - f[k - 1]) / (t[k] - t[k - 1]);
      double const right = (f[k + 1] - f[k]) / (t[k + 1] - t[k]);
      double const dd = 2.0 * (right - left) / (t[k + 1] - t[k - 1]);
      if (dd < worst) {
        worst = dd;
        witness = s[k];
      }
    }
    c[5].margin = worst;
    c[5].witness_s = witness;
    c[5].pass = finite && worst > 0.0;
  }

  // (phi_7): phi(s) -> phi(inf) > 0, judged by tail flatness.
  report.phi_inf = tail.phi;
  c[6].margin = plan.tail_tol * (1.0 + std::abs(tail.phi)) - std::abs(tail.phi - half_tail.phi);
  c[6].witness_s = plan.s_max;
  c[6].pass = std::isfinite(tail.phi) && tail.phi > 0.0 && c[6].margin > 0.0;

  return report;
}

struct StuartThreshold {
  std::array<double, 5> terms;
  std::size_t argmax;
  double value;
};

// Lower bound on A above which phi(s) = (1+s)^-3 + A satisfies all seven
// hypotheses for the given exponents.
inline StuartThreshold stuart_min_A_terms(double q, double p) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
  if (!(p > 1.0)) throw DomainError("p must be > 1");
  StuartThreshold r{};
  r.terms = {(q + 1.0) / (1.0 - q), 2.0 / (p + 1.0), 5.0, 81.0 / (128.0 * (1.0 - q)),
             (5184.0 / 3125.0 + (p + q) * 81.0 / 128.0) / ((1.0 - q) * (p - 1.0))};
  r.argmax = static_cast<std::size_t>(
      std::max_element(r.terms.begin(), r.terms.end()) - r.terms.begin());
  r.value = r.terms[r.argmax];
  return r;
}

inline double stuart_min_A(double q, double p) { return stuart_min_A_terms(q, p).value; }

}  // namespace nehari
