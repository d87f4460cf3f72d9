// Target distributions p*(x) ∝ exp(-f(x)) with f m-strongly convex and
// L-smooth, exposed through potential/gradient evaluators plus the constants
// the planner and kernel need. Quadratic targets carry their exact stationary
// covariance (the inverse Hessian).
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "klmc/rng.hpp"

namespace klmc {

struct TargetModel {
  int dim = 0;
  double m = 0.0;  // strong-convexity constant
  double L = 0.0;  // gradient Lipschitz constant, L >= m
  std::function<double(std::span<const double>)> potential;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::optional<std::vector<double>> minimizer;
  // Dense d*d row-major; present only for quadratic targets.
  std::optional<std::vector<double>> stationary_covariance;

  double kappa() const { return L / m; }
};

// f(x) = (m/2)||x - c||^2. The true smoothness constant is m; a looser
// declared L >= m may be supplied (still a valid Lipschitz constant, and the
// kernel then runs with u = 1/L_declared).
TargetModel make_isotropic_quadratic(int dim, double m, std::vector<double> center,
                                     std::optional<double> declared_L = std::nullopt);

// f(x) = 1/2 sum_i lambda_i (x_i - c_i)^2, m = min lambda, L = max lambda.
TargetModel make_diagonal_quadratic(std::vector<double> lambda, std::vector<double> center);

// f(x) = (m/2)||x||^2 + (L - m) sum_i log cosh(x_i). Hessian is
// m I + (L-m) diag(sech^2 x_i), which lies in [m I, L I]. No closed-form
// stationary moments.
TargetModel make_log_cosh(int dim, double m, double L);

// Validated gradient oracle: checks dimension and finiteness, then evaluates.
std::vector<double> grad(const TargetModel& model, std::span<const double> x);

struct NoisyGradientOracle {
  TargetModel base;
  double sigma2 = 0.0;  // per-coordinate noise variance; E||xi||^2 = d*sigma2
  enum class Noise { gaussian } noise = Noise::gaussian;
};

// grad(base, x) + sigma*zeta with zeta ~ N(0, I) drawn from `stream`.
// With sigma2 == 0 the stream is untouched and the output equals grad().
std::vector<double> grad_noisy(const NoisyGradientOracle& oracle, std::span<const double> x,
                               NormalStream& stream);

}  // namespace klmc
