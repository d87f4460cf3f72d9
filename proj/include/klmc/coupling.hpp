// Verification harness for the continuous-process contraction and the
// one-step discretization error, via synchronous coupling: two processes
// driven by the same Gaussian increments so the noise cancels in their
// difference. Fine Euler-Maruyama integration of
//   dv = -2 v dt - (1/L) grad f(x) dt + sqrt(4/L) dB,   dx = v dt
// (exact drift), or with the gradient frozen at the initial position.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "klmc/kernel.hpp"
#include "klmc/sampler.hpp"
#include "klmc/target.hpp"

namespace klmc {

struct CoupledPair {
  ChainState a;
  ChainState b;
};

struct LyapunovSample {
  double t = 0.0;
  double value = 0.0;  // ||z||^2 + ||z + psi||^2, z = x_a - x_b, psi = v_a - v_b
};

// Euler-Maruyama path up to t_end. The step count is ceil(t_end/h) and the
// actual step is t_end/n (uniform, lands exactly on t_end). increments holds
// one standard-normal d-vector per step, step-major; shorter buffers are a
// usage error. Requires h <= t_end/64.
ChainState integrate_exact_sde(const TargetModel& target, const ChainState& start,
                               double t_end, double h, std::span<const double> increments);

// Same scheme with grad f evaluated once at the start and frozen.
ChainState integrate_frozen_sde(const TargetModel& target, const ChainState& start,
                                double t_end, double h, std::span<const double> increments);

// Evolves both members of the pair with shared increments drawn from `stream`
// and samples the Lyapunov function at n_samples evenly spaced times
// (including t_end).
std::vector<LyapunovSample> contraction_experiment(const TargetModel& target,
                                                   const CoupledPair& pair0, double t_end,
                                                   double h, int n_samples,
                                                   NormalStream& stream);

struct DiscretizationResult {
  double measured = 0.0;     // sqrt(mean ||x - x~||^2 + ||v - v~||^2) at t = delta
  double measured_h2 = 0.0;  // same with step h/2 on the same Brownian paths
  double bound = 0.0;        // delta^2 sqrt(2 E_K / 5)
};

// Couples the exact-drift and frozen-drift processes through identical
// initial states (members of p0) and identical increments, integrated to
// t = delta with fine step h. energy_bound is the E_K entering the bound.
DiscretizationResult discretization_experiment(const TargetModel& target,
                                               const EnsembleState& p0, double delta,
                                               double h, double energy_bound,
                                               std::uint64_t seed, bool parallel = true);

}  // namespace klmc
