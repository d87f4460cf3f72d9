// Step-size / iteration-count planning. plan_fixed and plan_stochastic follow
// the convergence theorems for exact and noisy gradients; plan_epochs follows
// the varying-step-size schedule (halve delta, double n per epoch). Also the
// bound constants used by verification: E_K = 26(d/m + D^2) and the initial
// distance bound 3(d/m + D^2).
#pragma once

#include <cstdint>
#include <vector>

namespace klmc {

struct ProblemSpec {
  int d = 0;
  double m = 0.0;
  double L = 0.0;
  double D2 = 0.0;      // bound on ||x0 - x*||^2
  double eps = 0.0;     // target W2 accuracy
  double sigma2 = 0.0;  // gradient-noise scale, 0 for exact gradients

  double kappa() const { return L / m; }
  double moment_scale() const { return static_cast<double>(d) / m + D2; }  // d/m + D^2
};

enum class PlanMode { exact, stochastic };

struct SamplerPlan {
  double delta = 0.0;
  std::uint64_t n = 0;
  PlanMode mode = PlanMode::exact;
};

struct EpochSchedule {
  std::vector<std::pair<double, std::uint64_t>> epochs;  // (delta_i, n_i)
  double eps0 = 0.0;  // initial-error proxy, 3(d/m + D^2) nudged up one ulp
  int ell = 0;

  std::uint64_t total_steps() const {
    std::uint64_t t = 0;
    for (const auto& [d, n] : epochs) t += n;
    return t;
  }
};

// delta = eps/(104 kappa) * sqrt(1/(d/m + D^2)),
// n = ceil((52 kappa^2/eps) * sqrt(d/m + D^2) * log(24(d/m + D^2)/eps)).
// Throws planning_error if the formula yields delta >= 1.
SamplerPlan plan_fixed(const ProblemSpec& spec);

// delta = min{ (eps/kappa) sqrt(5/(479232(d/m + D^2))),
//              eps^2 L^2 / (1440 sigma^2 d kappa) },
// n = ceil((kappa/delta) * log(36(d/m + D^2)/eps)). Requires sigma2 > 0.
SamplerPlan plan_stochastic(const ProblemSpec& spec);

// delta_1 = eps0/(208 kappa) * sqrt(1/(d/m + D^2)),
// n_1 = ceil((208 kappa^2/eps0) * sqrt(d/m + D^2) * log 16),
// ell = ceil(log(eps0/eps)/log 2), then delta halves and n doubles.
EpochSchedule plan_epochs(const ProblemSpec& spec);

// 26(d/m + D^2): uniform bound on E||v||^2 along planner-driven runs.
double kinetic_energy_bound(const ProblemSpec& spec);

// 3(d/m + D^2): bound on W2^2(p0, p*) for the Dirac start (x0, 0).
double initial_distance_bound(const ProblemSpec& spec);

// Closed-form bound A^k x0 + C/(1-A) + B^2/(C + sqrt(1-A^2) B) dominating the
// recursion x_{k+1}^2 <= (A x_k + C)^2 + B^2. Requires A in [0,1) and
// B, C, x0 >= 0.
double recursion_bound(double A, double B, double C, double x0, std::uint64_t k);

}  // namespace klmc
