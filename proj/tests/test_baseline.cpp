#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "klmc/baseline.hpp"
#include "klmc/gaussian_chain.hpp"
#include "klmc/metrics.hpp"

using namespace klmc;

TEST_CASE("ula_step at a critical point with zero noise leaves x unchanged") {
  TargetModel t = make_isotropic_quadratic(2, 1.0, {0.3, -0.6});
  std::vector<double> x{0.3, -0.6};
  // Zero-noise behaviour via the degenerate limit: use a stream but check the
  // drift algebraically instead (grad = 0 at the minimizer).
  NormalStream s(1);
  std::vector<double> before = x;
  ula_step(t, x, 0.1, s);
  // x' - x is pure noise here; repeat with the same seed and subtract.
  NormalStream s2(1);
  std::vector<double> x2 = before;
  ula_step(t, x2, 0.1, s2);
  CHECK(x == x2);  // determinism under a fixed seed
  // Drift component: step from a non-minimizer with the same noise, compare.
  std::vector<double> y{1.3, -0.6};
  NormalStream s3(1);
  ula_step(t, y, 0.1, s3);
  CHECK(y[0] - x[0] == doctest::Approx((1.3 - 0.3) * (1.0 - 0.1)));
}

TEST_CASE("ULA stationary variance matches the AR(1) closed form") {
  // For f = x^2/2 the chain is x' = (1-delta) x + sqrt(2 delta) z, with
  // stationary variance 2 delta / (1 - (1-delta)^2).
  const double delta = 0.1;
  double exact = ula_stationary_var(delta, 1.0);
  CHECK(exact == doctest::Approx(1.0 / (1.0 - delta / 2.0)));
  CHECK(exact >= 1.0);
  CHECK(exact <= 1.0 / (1.0 - delta));

  RunConfig cfg;
  cfg.target = make_isotropic_quadratic(2, 1.0, {0.0, 0.0});
  cfg.plan = SamplerPlan{delta, 2000, PlanMode::exact};
  cfg.chains = 20000;
  cfg.seed = 4;
  cfg.stride = 2000;
  Trace t = ula_run(cfg);
  GaussianSummary g = empirical_moments(t.snapshots.back().state, MomentSel::x);
  CHECK(std::abs(g.cov(0, 0) - exact) <= 4.0 * std::sqrt(2.0 / cfg.chains) * exact);
  CHECK(std::abs(g.cov(1, 1) - exact) <= 4.0 * std::sqrt(2.0 / cfg.chains) * exact);
}

TEST_CASE("ula_run basics: n = 0 snapshot, determinism, zero velocities") {
  RunConfig cfg;
  cfg.target = make_isotropic_quadratic(2, 1.0, {0.0, 0.0});
  cfg.plan = SamplerPlan{0.1, 0, PlanMode::exact};
  cfg.chains = 8;
  cfg.x0 = {0.5, 0.5};
  Trace t = ula_run(cfg);
  REQUIRE(t.snapshots.size() == 1);
  CHECK(t.snapshots[0].state.chain_x(3)[0] == 0.5);

  cfg.plan = SamplerPlan{0.1, 50, PlanMode::exact};
  Trace a = ula_run(cfg);
  Trace b = ula_run(cfg);
  CHECK(a.snapshots.back().state.x == b.snapshots.back().state.x);
  for (double v : a.snapshots.back().state.v) CHECK(v == 0.0);

  cfg.parallel = false;
  Trace c = ula_run(cfg);
  CHECK(a.snapshots.back().state.x == c.snapshots.back().state.x);
}

TEST_CASE("ULA moment recursion matches the ensemble") {
  const double delta = 0.05;
  const int steps = 400;
  RunConfig cfg;
  cfg.target = make_isotropic_quadratic(1, 1.0, {0.0});
  cfg.plan = SamplerPlan{delta, steps, PlanMode::exact};
  cfg.chains = 40000;
  cfg.seed = 123;
  cfg.x0 = {2.0};
  cfg.stride = steps;
  Trace t = ula_run(cfg);
  GaussianSummary g = empirical_moments(t.snapshots.back().state, MomentSel::x);

  UlaCoord u{2.0, 0.0};
  for (int i = 0; i < steps; ++i) u = ula_coord_step(u, delta, 1.0, 0.0);
  CHECK(std::abs(g.mean[0] - u.mean) <= 4.0 * std::sqrt(u.var / cfg.chains));
  CHECK(std::abs(g.cov(0, 0) - u.var) <= 4.0 * std::sqrt(2.0 / cfg.chains) * u.var);
}

TEST_CASE("ula_step validation") {
  TargetModel t = make_isotropic_quadratic(2, 1.0, {0.0, 0.0});
  std::vector<double> x{0.0, 0.0};
  NormalStream s(1);
  CHECK_THROWS_AS(ula_step(t, x, 0.0, s), std::invalid_argument);
  std::vector<double> bad{0.0};
  CHECK_THROWS_AS(ula_step(t, bad, 0.1, s), std::invalid_argument);
}
