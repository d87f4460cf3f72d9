#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "klmc/target.hpp"

using namespace klmc;

namespace {

// Smoothness and strong convexity spot checks on random pairs.
void spot_check(const TargetModel& t, int pairs, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> x(t.dim), y(t.dim), gx(t.dim), gy(t.dim);
  for (int p = 0; p < pairs; ++p) {
    for (int j = 0; j < t.dim; ++j) {
      x[j] = normal(gen);
      y[j] = normal(gen);
    }
    t.gradient(x, gx);
    t.gradient(y, gy);
    double dg = 0.0, dx = 0.0, inner = 0.0;
    for (int j = 0; j < t.dim; ++j) {
      double gd = gx[j] - gy[j];
      double xd = x[j] - y[j];
      dg += gd * gd;
      dx += xd * xd;
      inner += gx[j] * (y[j] - x[j]);
    }
    // ||grad f(x) - grad f(y)|| <= L ||x - y||, with roundoff slack
    CHECK(std::sqrt(dg) <= t.L * std::sqrt(dx) * (1.0 + 1e-12) + 1e-12);
    // f(y) >= f(x) + <grad f(x), y-x> + m/2 ||x-y||^2
    double fy = t.potential(y), fx = t.potential(x);
    CHECK(fy >= fx + inner + 0.5 * t.m * dx - 1e-9 * (1.0 + std::abs(fy)));
  }
}

}  // namespace

TEST_CASE("gradients of the built-in targets") {
  TargetModel iso = make_isotropic_quadratic(2, 1.0, {0.0, 0.0});
  auto g = grad(iso, std::vector<double>{3.0, 4.0});
  CHECK(g[0] == 3.0);
  CHECK(g[1] == 4.0);

  TargetModel diag = make_diagonal_quadratic({1.0, 4.0}, {0.0, 0.0});
  g = grad(diag, std::vector<double>{1.0, 1.0});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 4.0);
  CHECK(diag.m == 1.0);
  CHECK(diag.L == 4.0);

  TargetModel lc = make_log_cosh(3, 1.0, 2.0);
  g = grad(lc, std::vector<double>{0.0, 0.0, 0.0});
  for (double gi : g) CHECK(gi == 0.0);
}

TEST_CASE("gradient usage errors") {
  TargetModel iso = make_isotropic_quadratic(2, 1.0, {0.0, 0.0});
  CHECK_THROWS_AS(grad(iso, std::vector<double>{1.0}), std::invalid_argument);
  double nan = std::nan("");
  CHECK_THROWS_AS(grad(iso, std::vector<double>{nan, 0.0}), std::invalid_argument);
}

TEST_CASE("smoothness/convexity spot checks on 1000 random pairs") {
  spot_check(make_isotropic_quadratic(3, 0.7, {0.1, -0.4, 2.0}), 1000, 11);
  spot_check(make_diagonal_quadratic({0.5, 1.0, 3.0}, {0.0, 1.0, -1.0}), 1000, 12);
  spot_check(make_log_cosh(3, 0.8, 2.5), 1000, 13);
  // Loose declared smoothness is still a valid Lipschitz constant.
  spot_check(make_isotropic_quadratic(2, 1.0, {0.0, 0.0}, 2.0), 1000, 14);
}

TEST_CASE("minimizer gradient is numerically zero") {
  for (const TargetModel& t :
       {make_diagonal_quadratic({1.0, 4.0}, {0.3, -0.7}), make_log_cosh(2, 1.0, 3.0)}) {
    auto g = grad(t, *t.minimizer);
    double norm = 0.0, xnorm = 0.0;
    for (int j = 0; j < t.dim; ++j) {
      norm += g[j] * g[j];
      xnorm += (*t.minimizer)[j] * (*t.minimizer)[j];
    }
    CHECK(std::sqrt(norm) <= 1e-10 * t.L * (1.0 + std::sqrt(xnorm)));
  }
}

TEST_CASE("stationary covariance is the inverse Hessian for quadratics") {
  TargetModel diag = make_diagonal_quadratic({2.0, 0.5}, {0.0, 0.0});
  const auto& cov = *diag.stationary_covariance;
  CHECK(cov[0] == 0.5);
  CHECK(cov[3] == 2.0);
  CHECK(cov[1] == 0.0);
  CHECK(cov[2] == 0.0);

  TargetModel iso = make_isotropic_quadratic(2, 4.0, {1.0, 1.0});
  CHECK((*iso.stationary_covariance)[0] == 0.25);
}

TEST_CASE("log-cosh Hessian bound: gradient slope stays in [m, L] on a 1-D probe") {
  TargetModel lc = make_log_cosh(1, 1.0, 3.0);
  // Central differences of the gradient at scattered points.
  for (double x : {-4.0, -1.0, -0.2, 0.0, 0.3, 1.5, 6.0}) {
    double h = 1e-5;
    double xp = x + h, xm = x - h;
    auto gp = grad(lc, {&xp, 1}), gm = grad(lc, {&xm, 1});
    double hess = (gp[0] - gm[0]) / (2.0 * h);
    CHECK(hess >= lc.m - 1e-6);
    CHECK(hess <= lc.L + 1e-6);
  }
}

TEST_CASE("noisy oracle: sigma2 = 0 is exact and consumes no randomness") {
  NoisyGradientOracle oracle{make_isotropic_quadratic(2, 1.0, {0.0, 0.0}), 0.0};
  NormalStream s1(5), s2(5);
  std::vector<double> x{0.5, -0.25};
  auto g = grad_noisy(oracle, x, s1);
  auto ref = grad(oracle.base, x);
  CHECK(g == ref);
  CHECK(s1.normal() == s2.normal());  // stream untouched
}

TEST_CASE("noisy oracle Monte Carlo: mean and second moment") {
  const int d = 4;
  const double sigma2 = 0.25;
  NoisyGradientOracle oracle{make_isotropic_quadratic(d, 1.0, {0.0, 0.0, 0.0, 0.0}), sigma2};
  std::vector<double> x{0.3, -0.2, 1.0, 0.0};
  auto exact = grad(oracle.base, x);

  const int n = 100000;
  NormalStream stream(99);
  std::vector<double> mean(d, 0.0);
  double second = 0.0;
  for (int i = 0; i < n; ++i) {
    auto g = grad_noisy(oracle, x, stream);
    for (int j = 0; j < d; ++j) {
      mean[j] += g[j];
      double xi = g[j] - exact[j];
      second += xi * xi;
    }
  }
  double sigma = std::sqrt(sigma2);
  double mean_tol = 4.0 * sigma * std::sqrt(static_cast<double>(d) / n);
  for (int j = 0; j < d; ++j) CHECK(std::abs(mean[j] / n - exact[j]) <= mean_tol);
  // E||xi||^2 = d sigma^2 = 1 for these parameters.
  CHECK(second / n == doctest::Approx(d * sigma2).epsilon(0.05));
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(make_isotropic_quadratic(0, 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_isotropic_quadratic(1, -1.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_isotropic_quadratic(1, 1.0, {0.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_diagonal_quadratic({1.0, -2.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_diagonal_quadratic({1.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_log_cosh(2, 2.0, 1.0), std::invalid_argument);
}
