// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "nehari/hypotheses.hpp"
#include "nehari/numeric.hpp"
#include "nehari/sobolev.hpp"

namespace nehari {

// Scalars the admissibility constants depend on.
struct ThresholdInputs {
  double q = 0.5;
  double p = 3.0;
  double rho0 = 1.0;
  double rho1 = 1.0;
  double rho3 = 1.0;
  double rho5 = 1.0;
  double a_sup = 1.0;  // max over nodes of |a|
  double b_sup = 1.0;
  double S_q1 = 1.0;   // S_{q+1}
  double S_p1 = 1.0;   // S_{p+1}
};

struct ThresholdReport {
  ThresholdInputs inputs;
  double kappa = 0.0;  // rho0/2 - rho1/(p+1)
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda0 = 0.0;
  double c1 = 0.0;
  double delta = 0.0;

  // delta^{(q+1)/2} (delta^{1-(q+1)/2} - lambda c1)
  double delta_lambda(double lambda) const {
    double const e = 0.5 * (inputs.q + 1.0);
    return std::pow(delta, e) * (std::pow(delta, 1.0 - e) - lambda * c1);
  }
};

inline ThresholdReport compute_thresholds(ThresholdInputs const& in) {
  if (!(in.q > 0.0 && in.q < 1.0) || !(in.p > 1.0)) throw DomainError("need 0 < q < 1 < p");
  for (double v : {in.rho0, in.rho1, in.rho3, in.rho5, in.a_sup, in.b_sup, in.S_q1, in.S_p1}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("threshold inputs (rho0, rho1, rho3, rho5, |a|, |b|, S) must be positive");
    }
  }
  double const q = in.q, p = in.p;
  ThresholdReport r;
  r.inputs = in;
  double const aS = in.a_sup * std::pow(in.S_q1, q + 1.0);
  double const bS = in.b_sup * std::pow(in.S_p1, p + 1.0);
  r.lambda1 = in.rho5 / ((p - q) * aS) * std::pow(in.rho3 / ((p - q) * bS), (1.0 - q) / (p - 1.0));
  r.kappa = 0.5 * in.rho0 - in.rho1 / (p + 1.0);
  if (!(r.kappa > 0.0)) throw ConfigError("rho0/2 - rho1/(p+1) must be positive");
  r.c1 = aS / ((q + 1.0) * std::pow(r.kappa, 0.5 * (q + 1.0)));
  r.delta = r.kappa * std::pow(in.rho0 / bS, 2.0 / (p - 1.0));
  r.lambda2 = std::pow(r.delta, 1.0 - 0.5 * (q + 1.0)) / r.c1;
  r.lambda0 = std::min(r.lambda1, r.lambda2);
  return r;
}

// Thresholds from certified phi constants and Sobolev estimates for S_{q+1}
// and S_{p+1}.
inline ThresholdReport compute_thresholds(HypothesisReport const& hyp, SobolevEstimates const& sob,
                                          double a_sup, double b_sup) {
  for (int i : {1, 3, 4}) {
    if (!hyp.passes(i)) {
      throw ConfigError("thresholds need (phi_" + std::to_string(i) + ") to hold");
    }
  }
  auto const S = [&](double exponent) {
    auto const it = sob.find(exponent);
    if (it == sob.end()) {
      throw ConfigError("missing Sobolev estimate for exponent " + std::to_string(exponent));
    }
    return it->second.value;
  };
  ThresholdInputs in;
  in.q = hyp.q;
  in.p = hyp.p;
  in.rho0 = hyp.rho[0];
  in.rho1 = hyp.rho[1];
  in.rho3 = hyp.rho[3];
  in.rho5 = hyp.rho[5];
  in.a_sup = a_sup;
  in.b_sup = b_sup;
  in.S_q1 = S(hyp.q + 1.0);
  in.S_p1 = S(hyp.p + 1.0);
  return compute_thresholds(in);
}

enum class Admissibility { admissible, marginal, inadmissible };

inline std::string_view to_string(Admissibility a) {
  switch (a) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::marginal: return "marginal";
    case Admissibility::inadmissible: return "inadmissible";
  }
  return "unknown";
}

inline Admissibility check_lambda(double lambda, ThresholdReport const& t) {
  if (lambda > 0.0 && lambda < t.lambda0) return Admissibility::admissible;
  if (lambda == t.lambda0 || (lambda > t.lambda0 && lambda < std::max(t.lambda1, t.lambda2))) {
    return Admissibility::marginal;
  }
  return Admissibility::inadmissible;
}

}  // namespace nehari
