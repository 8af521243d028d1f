// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace nehari;
using namespace nehari::testing;

namespace {

ThresholdInputs normalized(double q, double p) {
  ThresholdInputs in;
  in.q = q;
  in.p = p;
  in.rho0 = in.rho1 = in.rho3 = in.rho5 = 1.0;
  in.a_sup = in.b_sup = in.S_q1 = in.S_p1 = 1.0;
  return in;
}

}  // namespace

TEST(Lambda1, NormalizedInputsGiveOne) {
  EXPECT_NEAR(compute_thresholds(normalized(0.5, 1.5)).lambda1, 1.0, 1e-15);
}

TEST(Lambda1, TermByTerm) {
  long double const first = 1.0L / 2.5L;
  long double const second = std::pow(1.0L / 2.5L, 0.25L);
  double const oracle = double(first * second);
  double const got = compute_thresholds(normalized(0.5, 3.0)).lambda1;
  EXPECT_NEAR(got, oracle, 1e-15);
  EXPECT_NEAR(got, 0.31810, 1e-5);  // five printed digits, truncated
}

TEST(Lambda1, DecreasesInWeightNorms) {
  ThresholdInputs in = normalized(0.5, 3.0);
  in.rho0 = 6.0;
  in.rho1 = 7.0;
  in.rho3 = 2.4;
  in.rho5 = 10.0;
  in.a_sup = 0.9;
  in.b_sup = 0.6;
  double const base = compute_thresholds(in).lambda1;
  for (double f : {0.9, 1.1}) {
    ThresholdInputs a = in, b = in;
    a.a_sup *= f;
    b.b_sup *= f;
    double const la = compute_thresholds(a).lambda1, lb = compute_thresholds(b).lambda1;
    if (f > 1) {
      EXPECT_LT(la, base);
      EXPECT_LT(lb, base);
    } else {
      EXPECT_GT(la, base);
      EXPECT_GT(lb, base);
    }
  }
}

TEST(Thresholds, ConstantsFromTheirDefinitions) {
  ThresholdInputs in = normalized(0.4, 2.5);
  in.rho0 = 2.0;
  in.rho1 = 2.2;
  in.a_sup = 1.3;
  in.b_sup = 0.7;
  in.S_q1 = 0.3;
  in.S_p1 = 0.45;
  ThresholdReport const r = compute_thresholds(in);
  double const q = in.q, p = in.p;
  double const kappa = in.rho0 / 2 - in.rho1 / (p + 1);
  double const aS = in.a_sup * std::pow(in.S_q1, q + 1), bS = in.b_sup * std::pow(in.S_p1, p + 1);
  EXPECT_DOUBLE_EQ(r.kappa, kappa);
  EXPECT_DOUBLE_EQ(r.c1, aS / ((q + 1) * std::pow(kappa, (q + 1) / 2)));
  EXPECT_DOUBLE_EQ(r.delta, kappa * std::pow(in.rho0 / bS, 2 / (p - 1)));
  EXPECT_DOUBLE_EQ(r.lambda2, std::pow(r.delta, 1 - (q + 1) / 2) / r.c1);
  EXPECT_EQ(r.lambda0, std::min(r.lambda1, r.lambda2));
  EXPECT_GT(r.lambda0, 0.0);
}

TEST(Thresholds, DeltaPositiveForCertifiedModels) {
  Grid const g = Grid::cube(3, 5);
  SobolevEstimates sob;
  for (double i : {1.5, 4.0}) sob[i] = estimate_sobolev(g, i);
  for (PhiModel const& phi : {PhiModel::constant(1.0), PhiModel::stuart_example(6.0), PhiModel::stuart_example(20.0),
                              PhiModel::constant(0.2)}) {
    HypothesisReport const hyp = verify_hypotheses(phi, 0.5, 3.0);
    ASSERT_TRUE(hyp.passes(1));
    ThresholdReport const r = compute_thresholds(hyp, sob, 0.8, 1.1);
    EXPECT_GT(r.delta, 0.0);
    EXPECT_GT(r.kappa, 0.0);
  }
}

TEST(DeltaLambda, DecreasingAndVanishesAtLambda2) {
  ThresholdInputs in = normalized(0.5, 3.0);
  in.rho0 = 6.0;
  in.rho1 = 7.0;
  in.S_q1 = 0.16;
  in.S_p1 = 0.28;
  ThresholdReport const r = compute_thresholds(in);
  double prev = r.delta_lambda(1e-6 * r.lambda2);
  EXPECT_GT(prev, 0.0);
  for (int k = 1; k <= 100; ++k) {
    double const lam = r.lambda2 * k / 100.0;
    double const v = r.delta_lambda(lam);
    EXPECT_LT(v, prev);
    if (k < 100) EXPECT_GT(v, 0.0);
    prev = v;
  }
  EXPECT_LE(std::abs(r.delta_lambda(r.lambda2)), 1e-12 * std::max(1.0, r.delta));
}

TEST(Thresholds, MissingInputsAreConfigErrors) {
  HypothesisReport const good = verify_hypotheses(PhiModel::stuart_example(6.0), 0.5, 3.0);
  SobolevEstimates sob;
  sob[1.5] = estimate_sobolev(Grid::cube(3, 5), 1.5);
  EXPECT_THROW(compute_thresholds(good, sob, 1.0, 1.0), ConfigError);
  sob[4.0] = estimate_sobolev(Grid::cube(3, 5), 4.0);
  EXPECT_NO_THROW(compute_thresholds(good, sob, 1.0, 1.0));
  EXPECT_THROW(compute_thresholds(good, sob, 0.0, 1.0), ConfigError);
  HypothesisReport const bad = verify_hypotheses(PhiModel::stuart_example(1.0), 0.5, 3.0);
  ASSERT_FALSE(bad.passes(1));
  EXPECT_THROW(compute_thresholds(bad, sob, 1.0, 1.0), ConfigError);
}

TEST(Admissibility, Verdicts) {
  ThresholdReport r;
  r.lambda1 = 3.0;
  r.lambda2 = 2.0;
  r.lambda0 = 2.0;
  EXPECT_EQ(check_lambda(1.0, r), Admissibility::admissible);
  EXPECT_EQ(check_lambda(2.0, r), Admissibility::marginal);
  EXPECT_EQ(check_lambda(2.5, r), Admissibility::marginal);
  EXPECT_EQ(check_lambda(4.0, r), Admissibility::inadmissible);
  EXPECT_EQ(check_lambda(0.0, r), Admissibility::inadmissible);
}

TEST(Admissibility, ReferenceProblem) {
  ProblemConfig const cfg = make_problem(9, PhiModel::constant(1.0), 1.0);
  ThresholdReport const r = thresholds_for(cfg);
  EXPECT_EQ(check_lambda(cfg.with_lambda(r.lambda0 / 2), r), Admissibility::admissible);
  EXPECT_EQ(check_lambda(cfg.with_lambda(r.lambda0), r), Admissibility::marginal);
  EXPECT_EQ(check_lambda(cfg.with_lambda(2 * r.lambda0), r), Admissibility::inadmissible);
}

TEST(LowerBound, MinusProjectionsStayAboveDeltaLambda) {
  ProblemConfig const probe = make_problem(5, PhiModel::stuart_example(6.0), 1.0);
  ThresholdReport const r = thresholds_for(probe);
  std::mt19937_64 rng(21);
  for (double frac : {0.1, 0.5, 0.9}) {
    ProblemConfig const cfg = probe.with_lambda(frac * r.lambda0);
    double const bound = r.delta_lambda(cfg.lambda());
    ASSERT_GT(bound, 0.0);
    int projected = 0;
    for (int k = 0; k < 1000 && projected < 50; ++k) {
      try {
        NehariPoint const x = project(random_smooth_field(cfg.grid(), rng), cfg, Branch::minus);
        ++projected;
        EXPECT_GE(x.energy, bound - 1e-9);
      } catch (ProjectionError const&) {
      }
    }
    EXPECT_EQ(projected, 50);
  }
}
