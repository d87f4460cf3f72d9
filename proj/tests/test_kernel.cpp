#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "klmc/experiments.hpp"
#include "klmc/gaussian_chain.hpp"
#include "klmc/kernel.hpp"
#include "klmc/quadrature.hpp"
#include "klmc/rng.hpp"

using namespace klmc;

TEST_CASE("coefficients at delta=0.5, L=2 match the closed forms") {
  // Reference values evaluated in 50-digit arithmetic.
  KernelCoefficients k = kernel_coefficients(0.5, 2.0);
  CHECK(k.a_vv == doctest::Approx(0.36787944117144232).epsilon(1e-14));
  CHECK(k.b_v == doctest::Approx(0.15803013970713942).epsilon(1e-14));
  CHECK(k.a_xv == doctest::Approx(0.31606027941427884).epsilon(1e-14));
  CHECK(k.b_x == doctest::Approx(0.04598493014643029).epsilon(1e-14));
  CHECK(k.s_xx == doctest::Approx(0.042022810181144574).epsilon(1e-13));
  CHECK(k.s_vv == doctest::Approx(0.43233235838169365).epsilon(1e-14));
  CHECK(k.s_xv == doctest::Approx(0.099894100223432012).epsilon(1e-14));
}

TEST_CASE("coefficients vanish as delta -> 0 except the velocity decay") {
  KernelCoefficients k = kernel_coefficients(1e-9, 1.0);
  CHECK(k.a_vv == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(k.b_v) < 1e-8);
  CHECK(std::abs(k.a_xv) < 1e-8);
  CHECK(std::abs(k.b_x) < 1e-8);
  CHECK(std::abs(k.s_xx) < 1e-8);
  CHECK(std::abs(k.s_vv) < 1e-8);
  CHECK(std::abs(k.s_xv) < 1e-8);
}

TEST_CASE("covariance is PSD across a delta grid") {
  for (double L : {0.5, 1.0, 7.0}) {
    for (double delta = 1e-6; delta < 1.0; delta *= 1.7) {
      KernelCoefficients k = kernel_coefficients(delta, L);
      CHECK(k.s_xx > 0.0);
      CHECK(k.s_vv > 0.0);
      CHECK(k.s_xx * k.s_vv - k.s_xv * k.s_xv >= 0.0);
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(kernel_coefficients(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_coefficients(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_coefficients(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_coefficients(0.5, 0.0), std::invalid_argument);
  CHECK_NOTHROW(kernel_coefficients(1.0 - 1e-9, 1.0));
}

TEST_CASE("series branch matches 50-digit references for small delta") {
  // (L, delta, s_xx, b_x) frozen from mpmath at 50 digits.
  struct Ref {
    double L, delta, s_xx, b_x;
  };
  const Ref refs[] = {
      {1, 1e-8, 1.33333331333333352e-24, 4.9999999666666668333e-17},
      {1, 1e-7, 1.333333133333352e-21, 4.9999996666666833333e-15},
      {1, 1e-6, 1.3333313333351999987e-18, 4.9999966666683333327e-13},
      {1, 1e-5, 1.3333133335199986667e-15, 4.9999666668333326667e-11},
      {1, 1e-4, 1.3331333519986667454e-12, 4.9996666833326666889e-9},
      {1, 1e-3, 1.3313351986674535684e-9, 4.9966683326668888254e-7},
      {3, 1e-8, 4.4444443777777784e-25, 1.6666666555555556111e-17},
      {3, 1e-7, 4.44444377777784e-22, 1.6666665555555611111e-15},
      {3, 1e-6, 4.4444377777839999956e-19, 1.6666655555561111109e-13},
      {3, 1e-5, 4.4443777783999955556e-16, 1.6666555556111108889e-11},
      {3, 1e-4, 4.443777839995555818e-13, 1.6665555611108888963e-9},
      {3, 1e-3, 4.4377839955581785614e-10, 1.6655561108889629418e-7},
  };
  for (const Ref& r : refs) {
    KernelCoefficients k = kernel_coefficients(r.delta, r.L);
    CHECK(std::abs(k.s_xx - r.s_xx) <= 1e-10 * r.s_xx);
    CHECK(std::abs(k.b_x - r.b_x) <= 1e-10 * r.b_x);
  }
}

TEST_CASE("series and closed-form branches agree at the crossover") {
  // The implementation switches branches at 1e-2; evaluate the expm1-based
  // closed form on the series side of the threshold and vice versa.
  for (double L : {1.0, 2.0}) {
    auto closed_sxx = [&](double d) {
      return (d + std::expm1(-2.0 * d) - std::expm1(-4.0 * d) / 4.0) / L;
    };
    auto closed_bx = [&](double d) { return (d + std::expm1(-2.0 * d) / 2.0) / (2.0 * L); };
    for (double d : {0.999e-2, 1.001e-2}) {
      KernelCoefficients k = kernel_coefficients(d, L);
      CHECK(std::abs(k.s_xx - closed_sxx(d)) <= 1e-10 * k.s_xx);
      CHECK(std::abs(k.b_x - closed_bx(d)) <= 1e-10 * k.b_x);
    }
  }
}

TEST_CASE("coefficients match adaptive quadrature of the defining integrals") {
  auto check = [](double delta, double L) {
    KernelCoefficients k = kernel_coefficients(delta, L);
    double u = 1.0 / L;
    double b_v = u * adaptive_simpson([&](double s) { return std::exp(-2.0 * (delta - s)); },
                                      0.0, delta, 1e-12 * delta);
    double s_xx =
        (1.0 / L) * adaptive_simpson(
                        [&](double s) {
                          double w = 1.0 - std::exp(-2.0 * (delta - s));
                          return w * w;
                        },
                        0.0, delta, 1e-12 * delta * delta * delta);
    CHECK(std::abs(k.b_v - b_v) <= 1e-8 * b_v);
    CHECK(std::abs(k.s_xx - s_xx) <= 1e-8 * s_xx);
  };
  for (double delta : {1e-6, 1e-4, 1e-2, 0.1, 0.5, 0.99}) check(delta, 2.0);
}

TEST_CASE("conditional moments") {
  KernelCoefficients k = kernel_coefficients(0.5, 2.0);
  double x = 0.0, v = 1.0, g = 0.0, mx, mv;
  conditional_moments(k, {&x, 1}, {&v, 1}, {&g, 1}, {&mx, 1}, {&mv, 1});
  CHECK(mx == doctest::Approx(0.31606027941427884).epsilon(1e-14));
  CHECK(mv == doctest::Approx(0.36787944117144232).epsilon(1e-14));

  v = 0.0;
  g = 2.0;
  conditional_moments(k, {&x, 1}, {&v, 1}, {&g, 1}, {&mx, 1}, {&mv, 1});
  CHECK(mv == doctest::Approx(-0.31606027941427884).epsilon(1e-14));
  CHECK(mx == doctest::Approx(-0.09196986029286058).epsilon(1e-14));

  // Drift-free fixed point of the mean map.
  x = 1.7;
  v = 0.0;
  g = 0.0;
  conditional_moments(k, {&x, 1}, {&v, 1}, {&g, 1}, {&mx, 1}, {&mv, 1});
  CHECK(mx == 1.7);
  CHECK(mv == 0.0);
}

TEST_CASE("degenerate covariance collapses the draw to the conditional mean") {
  KernelCoefficients k = kernel_coefficients(0.3, 1.0);
  k.s_xx = k.s_vv = k.s_xv = 0.0;
  finalize_cholesky(k);
  ChainState st{{0.4, -0.3}, {0.1, 0.2}};
  std::vector<double> g{0.05, -0.02};
  NormalStream stream(7);
  ChainState out = step(k, st, g, stream);
  std::vector<double> mx(2), mv(2);
  conditional_moments(k, st.x, st.v, g, mx, mv);
  for (int j = 0; j < 2; ++j) {
    CHECK(out.x[j] == mx[j]);
    CHECK(out.v[j] == mv[j]);
  }
}

TEST_CASE("step_with_noise: z = 0 gives the mean, determinism, record-replay") {
  KernelCoefficients k = kernel_coefficients(0.25, 2.0);
  ChainState st{{0.4, -0.3}, {0.1, 0.2}};
  std::vector<double> g{0.05, -0.02};

  std::vector<double> z0(4, 0.0);
  ChainState mean = step_with_noise(k, st, g, z0);
  std::vector<double> mx(2), mv(2);
  conditional_moments(k, st.x, st.v, g, mx, mv);
  for (int j = 0; j < 2; ++j) {
    CHECK(mean.x[j] == mx[j]);
    CHECK(mean.v[j] == mv[j]);
  }

  std::vector<double> z{0.3, -1.2, 0.7, 0.1};
  ChainState a = step_with_noise(k, st, g, z);
  ChainState b = step_with_noise(k, st, g, z);
  CHECK(a.x == b.x);
  CHECK(a.v == b.v);

  // step() must equal step_with_noise() fed the recorded normals.
  NormalStream s1(42), s2(42);
  ChainState via_rng = step(k, st, g, s1);
  std::vector<double> rec(4);
  s2.fill_normal(rec);
  ChainState via_z = step_with_noise(k, st, g, rec);
  CHECK(via_rng.x == via_z.x);
  CHECK(via_rng.v == via_z.v);

  std::vector<double> zbad(3, 0.0);
  CHECK_THROWS_AS(step_with_noise(k, st, g, zbad), std::invalid_argument);
}

TEST_CASE("one-step Monte Carlo moments match the closed forms") {
  auto res = experiments::verify_kernel(1000000, 2024);
  CHECK(res.quad_pass);
  CHECK(res.mean_x_se <= 4.0);
  CHECK(res.mean_v_se <= 4.0);
  CHECK(res.cov_xx_rel <= 0.01);
  CHECK(res.cov_vv_rel <= 0.01);
  CHECK(res.cov_xv_rel <= 0.01);
}

TEST_CASE("one-step moment drift from stationarity is O(delta^2)") {
  // Exact infinite-ensemble drift of Var(v) after one step from p*, isotropic
  // m = L = 1; the log-log slope sits near 2.
  std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
  std::vector<double> errs;
  for (double d : deltas) {
    KernelCoefficients k = kernel_coefficients(d, 1.0);
    CoordGauss g{0.0, 0.0, 1.0, 0.0, 1.0};  // stationary: Var(x)=1/m, Var(v)=1/L
    CoordGauss out = kernel_coord_step(g, k, 1.0, 0.0);
    errs.push_back(std::abs(out.cov_vv - 1.0));
  }
  double slope = experiments::fit_loglog_slope(deltas, errs);
  CHECK(slope >= 1.5);
  CHECK(slope <= 2.5);
}
