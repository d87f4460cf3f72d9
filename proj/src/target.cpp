#include "klmc/target.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "klmc/common.hpp"

namespace klmc {

namespace {

void check_constants(int dim, double m, double L) {
  if (dim < 1) throw std::invalid_argument("target dimension must be >= 1");
  if (!(m > 0.0)) throw std::invalid_argument("strong-convexity constant m must be > 0");
  if (!(L >= m)) throw std::invalid_argument("smoothness constant L must satisfy L >= m");
}

}  // namespace

TargetModel make_isotropic_quadratic(int dim, double m, std::vector<double> center,
                                     std::optional<double> declared_L) {
  double L = declared_L.value_or(m);
  check_constants(dim, m, L);
  if (static_cast<int>(center.size()) != dim)
    throw std::invalid_argument("center dimension mismatch");

  TargetModel t;
  t.dim = dim;
  t.m = m;
  t.L = L;
  auto c = std::make_shared<std::vector<double>>(std::move(center));
  t.potential = [m, c](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double d = x[i] - (*c)[i];
      s += d * d;
    }
    return 0.5 * m * s;
  };
  t.gradient = [m, c](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = m * (x[i] - (*c)[i]);
  };
  t.minimizer = *c;
  std::vector<double> cov(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) cov[static_cast<std::size_t>(i) * dim + i] = 1.0 / m;
  t.stationary_covariance = std::move(cov);
  return t;
}

TargetModel make_diagonal_quadratic(std::vector<double> lambda, std::vector<double> center) {
  int dim = static_cast<int>(lambda.size());
  if (dim < 1) throw std::invalid_argument("lambda must be non-empty");
  if (center.size() != lambda.size())
    throw std::invalid_argument("center dimension mismatch");
  double m = lambda[0], L = lambda[0];
  for (double l : lambda) {
    if (!(l > 0.0)) throw std::invalid_argument("all curvatures must be > 0");
    m = std::min(m, l);
    L = std::max(L, l);
  }

  TargetModel t;
  t.dim = dim;
  t.m = m;
  t.L = L;
  auto lam = std::make_shared<std::vector<double>>(std::move(lambda));
  auto c = std::make_shared<std::vector<double>>(std::move(center));
  t.potential = [lam, c](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double d = x[i] - (*c)[i];
      s += (*lam)[i] * d * d;
    }
    return 0.5 * s;
  };
  t.gradient = [lam, c](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (*lam)[i] * (x[i] - (*c)[i]);
  };
  t.minimizer = *c;
  std::vector<double> cov(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) cov[static_cast<std::size_t>(i) * dim + i] = 1.0 / (*lam)[i];
  t.stationary_covariance = std::move(cov);
  return t;
}

TargetModel make_log_cosh(int dim, double m, double L) {
  check_constants(dim, m, L);

  TargetModel t;
  t.dim = dim;
  t.m = m;
  t.L = L;
  double a = L - m;
  t.potential = [m, a](std::span<const double> x) {
    double q = 0.0, lc = 0.0;
    for (double xi : x) {
      q += xi * xi;
      // log cosh, stable for large |xi|
      double ax = std::abs(xi);
      lc += ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
    }
    return 0.5 * m * q + a * lc;
  };
  t.gradient = [m, a](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = m * x[i] + a * std::tanh(x[i]);
  };
  t.minimizer = std::vector<double>(dim, 0.0);
  return t;
}

std::vector<double> grad(const TargetModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.dim)
    throw std::invalid_argument("grad: dimension mismatch");
  if (!all_finite(x)) throw std::invalid_argument("grad: non-finite input");
  std::vector<double> out(model.dim);
  model.gradient(x, out);
  return out;
}

std::vector<double> grad_noisy(const NoisyGradientOracle& oracle, std::span<const double> x,
                               NormalStream& stream) {
  std::vector<double> g = grad(oracle.base, x);
  if (oracle.sigma2 > 0.0) {
    double sig = std::sqrt(oracle.sigma2);
    for (double& gi : g) gi += sig * stream.normal();
  }
  return g;
}

}  // namespace klmc
