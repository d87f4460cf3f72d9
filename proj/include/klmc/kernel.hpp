// Exact one-step Gaussian transition of the discrete underdamped Langevin
// diffusion with friction gamma = 2 and inverse mass u = 1/L. A step over
// time delta, conditioned on (x0, v0) and the gradient g frozen at x0, is
// Gaussian per coordinate:
//
//   E[v]  = a_vv v0 - b_v g        a_vv = e^{-2 delta}
//   E[x]  = x0 + a_xv v0 - b_x g   a_xv = (1 - e^{-2 delta})/2
//   Cov per coordinate [[s_xx, s_xv], [s_xv, s_vv]]
//
// with the closed forms below; coordinates are independent.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "klmc/rng.hpp"

namespace klmc {

inline constexpr double kKernelFriction = 2.0;  // gamma; u = 1/L is implied

struct ChainState {
  std::vector<double> x;
  std::vector<double> v;
};

struct KernelCoefficients {
  double delta = 0.0;
  double L = 0.0;
  // Mean map.
  double a_vv = 0.0;  // e^{-2d}
  double b_v = 0.0;   // (1 - e^{-2d}) / (2L)
  double a_xv = 0.0;  // (1 - e^{-2d}) / 2
  double b_x = 0.0;   // (d - (1 - e^{-2d})/2) / (2L)
  // Per-coordinate covariance.
  double s_xx = 0.0;  // (d - e^{-4d}/4 - 3/4 + e^{-2d}) / L
  double s_vv = 0.0;  // (1 - e^{-4d}) / L
  double s_xv = 0.0;  // (1 + e^{-4d} - 2 e^{-2d}) / (2L)
  // Lower-triangular factor of the covariance: x gets c_xx z1,
  // v gets c_vx z1 + c_vv z2.
  double c_xx = 0.0;
  double c_vx = 0.0;
  double c_vv = 0.0;
};

// Closed-form coefficients. s_xx is Theta(delta^3) and b_x is Theta(delta^2);
// below delta = 1e-3 both switch to Taylor series to avoid cancellation (the
// branches agree to ~1e-12 relative at the crossover). Requires
// 0 < delta < 1 and L > 0.
KernelCoefficients kernel_coefficients(double delta, double L);

// Recomputes the Cholesky entries (c_xx, c_vx, c_vv) from (s_xx, s_vv, s_xv),
// clamping a roundoff-negative determinant in (-1e-18, 0) to singular and
// rejecting anything worse. Exposed for tests that build degenerate
// coefficient sets by hand.
void finalize_cholesky(KernelCoefficients& k);

// Mean of the one-step transition.
void conditional_moments(const KernelCoefficients& k, std::span<const double> x,
                         std::span<const double> v, std::span<const double> grad_at_x0,
                         std::span<double> mean_x, std::span<double> mean_v);

// In-place transition map with caller-supplied standard normals,
// z = [zx_0, zv_0, zx_1, zv_1, ...] (2d entries). Two calls with the same z
// share the noise exactly; this is the synchronous-coupling hook.
void apply_step(const KernelCoefficients& k, std::span<double> x, std::span<double> v,
                std::span<const double> grad_at_x0, std::span<const double> z);

// Spec-shaped wrappers over apply_step.
ChainState step_with_noise(const KernelCoefficients& k, const ChainState& state,
                           std::span<const double> grad_at_x0, std::span<const double> z);
ChainState step(const KernelCoefficients& k, const ChainState& state,
                std::span<const double> grad_at_x0, NormalStream& stream);

}  // namespace klmc
