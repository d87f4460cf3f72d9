#include "klmc/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "klmc/common.hpp"

namespace klmc {

namespace {

// Below this, s_xx (Theta(delta^3)) and b_x (Theta(delta^2)) lose too many
// digits to cancellation even in the expm1 forms; switch to Taylor series.
// At the crossover the expm1 form still carries ~1e-12 relative error and the
// series ~1e-15, so the branches agree to well under 1e-10.
constexpr double kSeriesThreshold = 1e-2;

// L * s_xx = 4/3 d^3 - 2 d^4 + 28/15 d^5 - 4/3 d^6 + 248/315 d^7 - 2/5 d^8
//            + 508/2835 d^9 - 68/945 d^10
double sxx_series(double d) {
  const double c3 = 4.0 / 3.0, c4 = -2.0, c5 = 28.0 / 15.0, c6 = -4.0 / 3.0,
               c7 = 248.0 / 315.0, c8 = -2.0 / 5.0, c9 = 508.0 / 2835.0,
               c10 = -68.0 / 945.0;
  double t = c9 + d * c10;
  t = c8 + d * t;
  t = c7 + d * t;
  t = c6 + d * t;
  t = c5 + d * t;
  t = c4 + d * t;
  t = c3 + d * t;
  return d * d * d * t;
}

// 2L * b_x = d^2 - 2/3 d^3 + 1/3 d^4 - 2/15 d^5 + 2/45 d^6 - 4/315 d^7
//            + 1/315 d^8 - 2/2835 d^9
double bx2L_series(double d) {
  const double c2 = 1.0, c3 = -2.0 / 3.0, c4 = 1.0 / 3.0, c5 = -2.0 / 15.0,
               c6 = 2.0 / 45.0, c7 = -4.0 / 315.0, c8 = 1.0 / 315.0,
               c9 = -2.0 / 2835.0;
  double t = c8 + d * c9;
  t = c7 + d * t;
  t = c6 + d * t;
  t = c5 + d * t;
  t = c4 + d * t;
  t = c3 + d * t;
  t = c2 + d * t;
  return d * d * t;
}

}  // namespace

void finalize_cholesky(KernelCoefficients& k) {
  double det = k.s_xx * k.s_vv - k.s_xv * k.s_xv;
  if (det < 0.0) {
    if (det > -1e-18) {
      // Analytically PSD; only roundoff can push the determinant below zero.
      k.s_xv = std::copysign(std::sqrt(k.s_xx * k.s_vv), k.s_xv);
    } else {
      throw std::logic_error("kernel covariance is not PSD");
    }
  }
  k.c_xx = std::sqrt(std::max(k.s_xx, 0.0));
  k.c_vx = k.c_xx > 0.0 ? k.s_xv / k.c_xx : 0.0;
  k.c_vv = std::sqrt(std::max(k.s_vv - k.c_vx * k.c_vx, 0.0));
}

KernelCoefficients kernel_coefficients(double delta, double L) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("kernel_coefficients: require 0 < delta < 1");
  if (!(L > 0.0)) throw std::invalid_argument("kernel_coefficients: require L > 0");

  KernelCoefficients k;
  k.delta = delta;
  k.L = L;

  double e2m1 = std::expm1(-2.0 * delta);  // e^{-2d} - 1
  double e4m1 = std::expm1(-4.0 * delta);

  k.a_vv = 1.0 + e2m1;
  k.b_v = -e2m1 / (2.0 * L);
  k.a_xv = -e2m1 / 2.0;
  k.s_vv = -e4m1 / L;
  k.s_xv = e2m1 * e2m1 / (2.0 * L);  // (1 - e^{-2d})^2 / (2L)

  if (delta < kSeriesThreshold) {
    k.b_x = bx2L_series(delta) / (2.0 * L);
    k.s_xx = sxx_series(delta) / L;
  } else {
    k.b_x = (delta + e2m1 / 2.0) / (2.0 * L);
    k.s_xx = (delta + e2m1 - e4m1 / 4.0) / L;
  }

  finalize_cholesky(k);
  return k;
}

void conditional_moments(const KernelCoefficients& k, std::span<const double> x,
                         std::span<const double> v, std::span<const double> grad_at_x0,
                         std::span<double> mean_x, std::span<double> mean_v) {
  std::size_t d = x.size();
  if (v.size() != d || grad_at_x0.size() != d || mean_x.size() != d || mean_v.size() != d)
    throw std::invalid_argument("conditional_moments: dimension mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    mean_x[i] = x[i] + k.a_xv * v[i] - k.b_x * grad_at_x0[i];
    mean_v[i] = k.a_vv * v[i] - k.b_v * grad_at_x0[i];
  }
}

void apply_step(const KernelCoefficients& k, std::span<double> x, std::span<double> v,
                std::span<const double> grad_at_x0, std::span<const double> z) {
  std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) {
    double zx = z[2 * i], zv = z[2 * i + 1];
    double mx = x[i] + k.a_xv * v[i] - k.b_x * grad_at_x0[i];
    double mv = k.a_vv * v[i] - k.b_v * grad_at_x0[i];
    x[i] = mx + k.c_xx * zx;
    v[i] = mv + k.c_vx * zx + k.c_vv * zv;
  }
}

ChainState step_with_noise(const KernelCoefficients& k, const ChainState& state,
                           std::span<const double> grad_at_x0, std::span<const double> z) {
  std::size_t d = state.x.size();
  if (state.v.size() != d || grad_at_x0.size() != d)
    throw std::invalid_argument("step_with_noise: dimension mismatch");
  if (z.size() != 2 * d)
    throw std::invalid_argument("step_with_noise: noise vector must have 2d entries");
  ChainState out = state;
  apply_step(k, out.x, out.v, grad_at_x0, z);
  return out;
}

ChainState step(const KernelCoefficients& k, const ChainState& state,
                std::span<const double> grad_at_x0, NormalStream& stream) {
  std::vector<double> z(2 * state.x.size());
  stream.fill_normal(z);
  return step_with_noise(k, state, grad_at_x0, z);
}

}  // namespace klmc
