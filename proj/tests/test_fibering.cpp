// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace nehari;
using namespace nehari::testing;

namespace {

// Fourth-order central difference of f at t with step rel * t.
double derivative(auto&& f, double t, double rel = 1e-3) {
  double const h = rel * t;
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = lo * std::pow(hi / lo, double(k) / double(n - 1));
  return t;
}

int sign_changes(Ray const& ray, std::vector<double> const& ts) {
  int changes = 0;
  int prev = sign_of(ray.gamma_prime(ts.front()));
  for (std::size_t k = 1; k < ts.size(); ++k) {
    int const s = sign_of(ray.gamma_prime(ts[k]));
    if (s != 0 && prev != 0 && s != prev) ++changes;
    if (s != 0) prev = s;
  }
  return changes;
}

ProblemConfig stuart(double lambda, std::size_t n = 5) {
  return make_problem(n, PhiModel::stuart_example(6.0), lambda);
}

}  // namespace

TEST(Ray, DerivativeCallsRejectNonPositiveT) {
  ProblemConfig const cfg = stuart(1.0);
  std::mt19937_64 rng(1);
  Ray const ray(random_field(cfg.grid(), rng), cfg);
  EXPECT_THROW(ray.gamma_prime(0.0), DomainError);
  EXPECT_THROW(ray.gamma_second(-1.0), DomainError);
  EXPECT_THROW(ray.m(0.0), DomainError);
  EXPECT_THROW(ray.m_prime(0.0), DomainError);
  EXPECT_THROW(ray.eta(0.0), DomainError);
  EXPECT_THROW(ray.eta_prime(0.0), DomainError);
  EXPECT_EQ(ray.gamma(0.0), 0.0);
  EXPECT_THROW(ray.gamma(-1.0), DomainError);
}

TEST(Ray, PhiOneClosedForms) {
  ProblemConfig const cfg = make_problem(5, PhiModel::constant(1.0), 1.7);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
    for (double t : {0.1, 0.9, 3.0}) {
      double const expected = t * ray.E() - 1.7 * std::pow(t, 0.5) * ray.A() - std::pow(t, 3.0) * ray.B();
      EXPECT_NEAR(ray.gamma_prime(t), expected, 1e-12 * (t * ray.E() + std::abs(expected)));
      EXPECT_NEAR(ray.eta(t), 0.5 * std::pow(t, -2.0) * ray.E(), 1e-13 * ray.eta(t));
    }
  }
}

TEST(Ray, EtaForConstantPhi) {
  ProblemConfig const cfg = make_problem(5, PhiModel::constant(2.5), 1.0);
  std::mt19937_64 rng(3);
  Ray const ray(random_field(cfg.grid(), rng), cfg);
  for (double t : {0.3, 1.0, 4.0}) {
    double const expected = 0.5 * 2.5 * std::pow(t, -2.0) * ray.E();
    EXPECT_NEAR(ray.eta(t), expected, 1e-13 * expected);
  }
}

TEST(Ray, AnalyticDerivativesMatchFiniteDifferences) {
  ProblemConfig const cfg = stuart(0.9);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
    double const t = log_uniform(rng, 0.2, 5.0);
    auto rel = [](double an, double fd) { return std::abs(an - fd) / std::abs(an); };
    EXPECT_LE(rel(ray.gamma_prime(t), derivative([&](double s) { return ray.gamma(s); }, t)), 1e-7);
    EXPECT_LE(rel(ray.gamma_second(t), derivative([&](double s) { return ray.gamma_prime(s); }, t)), 1e-7);
    EXPECT_LE(rel(ray.m_prime(t), derivative([&](double s) { return ray.m(s); }, t)), 1e-7);
    EXPECT_LE(rel(ray.eta_prime(t), derivative([&](double s) { return ray.eta(s); }, t)), 1e-7);
    EXPECT_LE(rel(ray.h_prime(t), derivative([&](double s) { return ray.h(s); }, t)), 1e-7);
  }
}

TEST(Ray, FactorizationThroughM) {
  ProblemConfig const cfg = stuart(1.1);
  std::mt19937_64 rng(5);
  double const q = cfg.q();
  for (int k = 0; k < 10; ++k) {
    Ray const ray(random_scaled_field(cfg.grid(), rng), cfg);
    double const t = log_uniform(rng, 0.1, 10.0);
    EXPECT_LE(relative_error(ray.gamma_prime(t), std::pow(t, q) * (ray.m(t) - ray.lambda_A())), 1e-12);
  }
}

// Off the manifold the scaled second derivative differs from t^{q+2} m'(t) by
// q t gamma'(t); on it the two agree.
TEST(Ray, SecondDerivativeAlongScaledRay) {
  ProblemConfig const cfg = stuart(1.1);
  std::mt19937_64 rng(6);
  double const q = cfg.q();
  for (int k = 0; k < 20; ++k) {
    Field const u = random_smooth_field(cfg.grid(), rng);
    Ray const ray(u, cfg);
    double const t = log_uniform(rng, 0.1, 10.0);
    double const lhs = Ray(u.scaled(t), cfg).gamma_second(1.0);
    double const rhs = std::pow(t, q + 2.0) * ray.m_prime(t) + q * t * ray.gamma_prime(t);
    EXPECT_LE(relative_error(lhs, rhs), 1e-10);
  }
}

// m(t) decays like t^{1-q} at the origin; its sign at large t follows B_u.
TEST(Ray, MLimits) {
  std::mt19937_64 rng(7);
  for (double q : {0.5, 0.1}) {
    ProblemConfig const cfg = make_problem(5, PhiModel::stuart_example(6.0), 1.0, q);
    double const rho1 = verify_hypotheses(cfg.phi(), q, cfg.p()).rho[1];
    for (int k = 0; k < 20; ++k) {
      Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
      for (double t : {1e-8, 1e-10, 1e-12}) {
        double const bound = rho1 * std::pow(t, 1 - q) * ray.E() + std::pow(t, cfg.p() - q) * std::abs(ray.B());
        EXPECT_LE(std::abs(ray.m(t)), bound);
      }
      if (q == 0.1) EXPECT_LE(std::abs(ray.m(1e-8)), 1e-6 * ray.E());
      if (ray.B() > 0.0) EXPECT_LT(ray.m(1e6), 0.0);
      if (ray.B() < 0.0) EXPECT_GT(ray.m(1e6), 0.0);
    }
  }
}

TEST(Ray, MIncreasingWithoutPositiveB) {
  ProblemConfig base = stuart(1.0);
  Field b = base.b();
  for (double& v : b.values()) v = -std::abs(v);
  ProblemConfig const cfg = with_weights(base, base.a(), b);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 5; ++k) {
    Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
    for (double t : log_grid(1e-4, 1e4, 200)) EXPECT_GT(ray.m_prime(t), 0.0) << t;
  }
}

TEST(Eta, StrictlyDecreasing) {
  std::mt19937_64 rng(9);
  for (PhiModel const& phi : {PhiModel::stuart_example(6.0), PhiModel::constant(1.0), PhiModel::stuart_example(40.0)}) {
    ASSERT_TRUE(verify_hypotheses(phi, 0.5, 3.0).passes(5));
    ProblemConfig const cfg = make_problem(5, phi, 1.0);
    for (int k = 0; k < 50; ++k) {
      Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
      double const t1 = log_uniform(rng, 1e-2, 1e2);
      double const t2 = t1 * log_uniform(rng, 1.0 + 1e-6, 10.0);
      EXPECT_LT(ray.eta(t2), ray.eta(t1));
      EXPECT_LT(ray.eta_prime(t1), 0.0);
    }
  }
}

TEST(Tilde, PhiOneClosedForm) {
  ProblemConfig const cfg = make_problem(5, PhiModel::constant(1.0), 1.0);
  std::mt19937_64 rng(10);
  int checked = 0;
  for (int k = 0; k < 40 && checked < 10; ++k) {
    Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
    if (!(ray.B() > 0.0)) continue;
    ++checked;
    double const expected = std::pow(0.5 * ray.E() / (2.5 * ray.B()), 0.5);
    double const t = find_tilde(ray);
    EXPECT_LE(relative_error(t, expected), 1e-10);
    EXPECT_GT(ray.m_prime(t * (1 - 1e-3)), 0.0);
    EXPECT_LT(ray.m_prime(t * (1 + 1e-3)), 0.0);
  }
  EXPECT_EQ(checked, 10);
}

TEST(Tilde, AgreesWithDenseArgmaxOfM) {
  ProblemConfig const cfg = stuart(1.0);
  std::mt19937_64 rng(11);
  auto const ts = log_grid(1e-6, 1e6, 100000);
  double const cell = std::log(ts[1] / ts[0]);
  int checked = 0;
  for (int k = 0; k < 40 && checked < 3; ++k) {
    Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
    if (!(ray.B() > 0.0)) continue;
    ++checked;
    double const t = find_tilde(ray);
    EXPECT_GT(ray.m_prime(t * (1 - 1e-3)), 0.0);
    EXPECT_LT(ray.m_prime(t * (1 + 1e-3)), 0.0);
    std::size_t best = 0;
    double best_m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ts.size(); ++j) {
      double const v = ray.m(ts[j]);
      if (v > best_m) {
        best_m = v;
        best = j;
      }
    }
    EXPECT_LE(std::abs(std::log(t / ts[best])), cell);
  }
  EXPECT_EQ(checked, 3);
}

TEST(Tilde, RequiresPositiveB) {
  ProblemConfig base = stuart(1.0);
  ProblemConfig const cfg = with_weights(base, base.a(), constant_field(base.grid(), -1.0));
  std::mt19937_64 rng(12);
  Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
  EXPECT_THROW(find_tilde(ray), PreconditionError);
  EXPECT_THROW(find_tmax(ray), PreconditionError);
}

TEST(TMax, PhiOneClosedFormAndScaling) {
  ProblemConfig const cfg = make_problem(5, PhiModel::constant(1.0), 1.0);
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int k = 0; k < 40 && checked < 5; ++k) {
    Field const u = random_smooth_field(cfg.grid(), rng);
    Ray const ray(u, cfg);
    if (!(ray.B() > 0.0)) continue;
    ++checked;
    TMax const tm = find_tmax(ray);
    EXPECT_LE(relative_error(tm.t, std::pow(ray.E() / ray.B(), 0.5)), 1e-10);
    EXPECT_EQ(tm.critical_points, 1);
    for (double c : {0.5, 3.0}) {
      EXPECT_LE(relative_error(find_tmax(u.scaled(c), cfg).t, tm.t / c), 1e-10);
    }
  }
  EXPECT_EQ(checked, 5);
}

TEST(TMax, HeightAtLeastDelta) {
  ProblemConfig const cfg = stuart(1.0);
  ThresholdReport const th = thresholds_for(cfg);
  ASSERT_GT(th.delta, 0.0);
  std::mt19937_64 rng(14);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 50; ++k) {
    Ray const ray(random_smooth_field(cfg.grid(), rng), cfg);
    if (!(ray.B() > 0.0)) continue;
    ++checked;
    EXPECT_GE(find_tmax(ray).h, th.delta);
  }
  EXPECT_EQ(checked, 50);
}

class Cases : public ::testing::Test {
 protected:
  ProblemConfig base = stuart(1.0);
  Field bump = [this] {
    Grid const& g = base.grid();
    Field u(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto const x = g.coordinates(i);
      u[i] = x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * x[2] * (1 - x[2]);
    }
    return u;
  }();
  ProblemConfig weights(double a, double b, double lambda = 1.0) const {
    return with_weights(base.with_lambda(lambda), constant_field(base.grid(), a), constant_field(base.grid(), b));
  }
};

TEST_F(Cases, Club1) {
  FiberingDiagnosis const d = classify(bump, weights(-1.0, -1.0));
  EXPECT_EQ(d.kind, FiberingCase::club1);
  EXPECT_TRUE(d.roots.empty());
  EXPECT_FALSE(d.t_tilde);
  EXPECT_THROW(project(bump, weights(-1.0, -1.0), Branch::plus), ProjectionError);
}

TEST_F(Cases, Club2) {
  ProblemConfig const cfg = weights(1.0, -1.0);
  FiberingDiagnosis const d = classify(bump, cfg);
  EXPECT_EQ(d.kind, FiberingCase::club2);
  ASSERT_EQ(d.roots.size(), 1u);
  EXPECT_EQ(d.roots[0].gamma2_sign, 1);
  EXPECT_GT(gamma_second(bump, d.roots[0].t, cfg), 0.0);
  NehariPoint const x = project(bump, cfg, Branch::plus);
  EXPECT_LT(x.energy, 0.0);
  EXPECT_THROW(project(bump, cfg, Branch::minus), ProjectionError);
}

TEST_F(Cases, Club3) {
  ProblemConfig const cfg = weights(-1.0, 1.0);
  FiberingDiagnosis const d = classify(bump, cfg);
  EXPECT_EQ(d.kind, FiberingCase::club3);
  ASSERT_EQ(d.roots.size(), 1u);
  EXPECT_EQ(d.roots[0].gamma2_sign, -1);
  EXPECT_GT(d.roots[0].t, *d.t_tilde);
  NehariPoint const x = project(bump, cfg, Branch::minus);
  EXPECT_GT(x.energy, 0.0);
  EXPECT_LT(x.gamma2, 0.0);
}

TEST_F(Cases, Club4TwoRootsOrdered) {
  ProblemConfig const cfg = weights(1.0, 1.0, 1e-3);
  FiberingDiagnosis const d = classify(bump, cfg);
  EXPECT_EQ(d.kind, FiberingCase::club4_two);
  ASSERT_EQ(d.roots.size(), 2u);
  EXPECT_LT(d.roots[0].t, *d.t_tilde);
  EXPECT_LT(*d.t_tilde, d.roots[1].t);
  EXPECT_EQ(d.roots[0].gamma2_sign, 1);
  EXPECT_EQ(d.roots[1].gamma2_sign, -1);
  EXPECT_TRUE(d.t_max);
}

TEST_F(Cases, Club4NoneAndTangent) {
  FiberingDiagnosis const probe = classify(bump, weights(1.0, 1.0));
  double const lambda_tangent = *probe.m_tilde / probe.A;
  FiberingDiagnosis const none = classify(bump, weights(1.0, 1.0, 2.0 * lambda_tangent));
  EXPECT_EQ(none.kind, FiberingCase::club4_none);
  EXPECT_TRUE(none.roots.empty());
  ProblemConfig const tangent_cfg = weights(1.0, 1.0, lambda_tangent);
  FiberingDiagnosis const tangent = classify(bump, tangent_cfg);
  EXPECT_EQ(tangent.kind, FiberingCase::club4_tangent);
  EXPECT_THROW(project(bump, tangent_cfg, Branch::plus), ProjectionError);
  EXPECT_THROW(project(bump, tangent_cfg, Branch::minus), ProjectionError);
}

TEST_F(Cases, ZeroFieldIsPreconditionError) {
  EXPECT_THROW(classify(Field(base.grid()), base), PreconditionError);
  EXPECT_THROW(project(Field(base.grid()), base, Branch::plus), PreconditionError);
}

// The scan sees roots only inside its window, so the window count is compared
// with the diagnosed roots in the same window; a second scan over the whole
// bracket range checks the total.
TEST(Classify, RootCountsMatchScanOracle) {
  ProblemConfig const cfg = stuart(1.0);
  double const lambda0 = thresholds_for(cfg).lambda0;
  auto const window = log_grid(1e-6, 1e6, 100000);
  auto const full = log_grid(1e-9, 1e9, 100000);
  std::mt19937_64 rng(15);
  int agree = 0;
  for (int k = 0; k < 30; ++k) {
    ProblemConfig const c = cfg.with_lambda(lambda0 * log_uniform(rng, 0.05, 20.0));
    Ray const ray(random_smooth_field(c.grid(), rng), c);
    FiberingDiagnosis const d = classify(ray);
    int in_window = 0;
    for (FiberingRoot const& r : d.roots) in_window += r.t >= 1e-6 && r.t <= 1e6;
    int const scan = sign_changes(ray, window);
    int const scan_full = sign_changes(ray, full);
    EXPECT_EQ(in_window, scan) << to_string(d.kind);
    EXPECT_EQ(int(d.roots.size()), scan_full) << to_string(d.kind);
    agree += in_window == scan && int(d.roots.size()) == scan_full;
    for (FiberingRoot const& r : d.roots) {
      EXPECT_LE(r.relative_residual, 1e-12);
      EXPECT_LE(r.width, 1e-12 * r.t);
    }
    if (d.kind == FiberingCase::club2) EXPECT_EQ(d.roots.at(0).gamma2_sign, 1);
    if (d.kind == FiberingCase::club3) EXPECT_EQ(d.roots.at(0).gamma2_sign, -1);
  }
  EXPECT_EQ(agree, 30);
}

TEST(Project, IdempotentAndIdentityAtRoot) {
  ProblemConfig const cfg = stuart(1.0);
  std::mt19937_64 rng(16);
  double const q = cfg.q();
  int checked = 0;
  for (int k = 0; k < 200 && checked < 20; ++k) {
    Field const u = random_smooth_field(cfg.grid(), rng);
    for (Branch b : {Branch::plus, Branch::minus}) {
      try {
        NehariPoint const x = project(u, cfg, b);
        ++checked;
        double const t = x.t_star;
        EXPECT_LE(x.constraint, cfg.tol().root);
        EXPECT_LE(relative_error(x.gamma2, std::pow(t, q + 2.0) * m_prime(u, t, cfg)), 1e-8);
        EXPECT_EQ(sign_of(x.gamma2), b == Branch::plus ? 1 : -1);
        NehariPoint const again = project(x.u, cfg, b);
        EXPECT_NEAR(again.t_star, 1.0, 1e-12);
      } catch (ProjectionError const&) {
      }
    }
  }
  EXPECT_GE(checked, 20);
}

TEST(Project, CapBreachBecomesProjectionError) {
  ProblemConfig const cfg = stuart(1e-9);
  std::mt19937_64 rng(17);
  // A checkerboard-like field has a huge gradient energy, so its plus root
  // sits far below the lower bracket cap at this lambda.
  Field u = random_field(cfg.grid(), rng);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (i % 2 ? 1.0 : -1.0) * (1.0 + 0.1 * u[i]);
  Ray const ray(u, cfg);
  if (ray.A() > 0.0) EXPECT_THROW(project(u, cfg, Branch::plus), ProjectionError);
}
