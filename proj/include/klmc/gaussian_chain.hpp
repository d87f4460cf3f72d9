// Exact per-coordinate moment propagation for quadratic targets. On a target
// with diagonal Hessian both the underdamped kernel chain and ULA are linear
// Gaussian maps, so the distribution of each iterate is exactly Gaussian and
// its moments (hence the true W2 to p*) can be tracked in closed form. Used
// by the scaling comparison and as an oracle in tests.
#pragma once

#include <cstdint>
#include <vector>

#include "klmc/kernel.hpp"

namespace klmc {

struct CoordGauss {
  double mean_x = 0.0;
  double mean_v = 0.0;
  double cov_xx = 0.0;
  double cov_xv = 0.0;
  double cov_vv = 0.0;
};

// One kernel step for a coordinate with curvature lambda and center c:
// mean' = A mean + const, cov' = A cov A^T + Q.
CoordGauss kernel_coord_step(const CoordGauss& g, const KernelCoefficients& k,
                             double lambda, double center);

struct UlaCoord {
  double mean = 0.0;
  double var = 0.0;
};

UlaCoord ula_coord_step(const UlaCoord& g, double delta, double lambda, double center);

// Squared x-marginal W2 of one coordinate to N(center, 1/lambda).
double w2x_coord_sq(const CoordGauss& g, double lambda, double center);
double w2x_coord_sq(const UlaCoord& g, double lambda, double center);

// Squared joint (x,v) W2 of one coordinate to N((center,0), diag(1/lambda, 1/L)).
double w2_joint_coord_sq(const CoordGauss& g, double lambda, double L, double center);

// Exact ULA stationary variance for curvature lambda: 2 delta / (1 - (1 - delta lambda)^2).
double ula_stationary_var(double delta, double lambda);

// First iteration k <= cap at which the x-marginal W2 of the full chain drops
// to eps. All coordinates share curvature lambda (isotropic target, center 0);
// offsets holds the per-coordinate initial means. Returns 0 if never reached.
std::uint64_t kernel_chain_crossing(double lambda, double L, double delta,
                                    const std::vector<double>& offsets, double eps,
                                    std::uint64_t cap);
std::uint64_t ula_chain_crossing(double lambda, double delta,
                                 const std::vector<double>& offsets, double eps,
                                 std::uint64_t cap);

}  // namespace klmc
