#include "klmc/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "klmc/common.hpp"

namespace klmc {

namespace {

void validate(const ProblemSpec& s) {
  if (s.d < 1) throw std::invalid_argument("planner: d must be >= 1");
  if (!(s.m > 0.0) || !(s.L >= s.m))
    throw std::invalid_argument("planner: require 0 < m <= L");
  if (!(s.D2 >= 0.0)) throw std::invalid_argument("planner: D2 must be >= 0");
  if (!(s.eps > 0.0)) throw std::invalid_argument("planner: eps must be > 0");
  if (!(s.sigma2 >= 0.0)) throw std::invalid_argument("planner: sigma2 must be >= 0");
}

std::uint64_t ceil_iterations(double n_real) {
  // Ceiling per the theorem inequalities; never below one step.
  if (!(n_real < 9.0e18)) throw planning_error("iteration count overflows");
  double c = std::ceil(n_real);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

}  // namespace

SamplerPlan plan_fixed(const ProblemSpec& spec) {
  validate(spec);
  if (spec.sigma2 != 0.0)
    throw std::invalid_argument("plan_fixed: exact-gradient plan requires sigma2 == 0");
  double X = spec.moment_scale();
  double kappa = spec.kappa();
  double delta = spec.eps / (104.0 * kappa) * std::sqrt(1.0 / X);
  if (delta >= 1.0)
    throw planning_error("plan_fixed: eps = " + std::to_string(spec.eps) +
                         " yields step size " + std::to_string(delta) +
                         " >= 1; the theorem requires delta < 1 (request a smaller eps)");
  double n_real = (52.0 * kappa * kappa / spec.eps) * std::sqrt(X) *
                  std::log(24.0 * X / spec.eps);
  return {delta, ceil_iterations(n_real), PlanMode::exact};
}

SamplerPlan plan_stochastic(const ProblemSpec& spec) {
  validate(spec);
  if (!(spec.sigma2 > 0.0))
    throw std::invalid_argument("plan_stochastic: requires sigma2 > 0");
  double X = spec.moment_scale();
  double kappa = spec.kappa();
  double branch_contract = (spec.eps / kappa) * std::sqrt(5.0 / (479232.0 * X));
  double branch_noise = spec.eps * spec.eps * spec.L * spec.L /
                        (1440.0 * spec.sigma2 * spec.d * kappa);
  double delta = std::min(branch_contract, branch_noise);
  if (delta >= 1.0)
    throw planning_error("plan_stochastic: eps yields step size >= 1");
  double n_real = (kappa / delta) * std::log(36.0 * X / spec.eps);
  return {delta, ceil_iterations(n_real), PlanMode::stochastic};
}

EpochSchedule plan_epochs(const ProblemSpec& spec) {
  validate(spec);
  if (spec.sigma2 != 0.0)
    throw std::invalid_argument("plan_epochs: requires sigma2 == 0");
  double X = spec.moment_scale();
  double kappa = spec.kappa();
  // Smallest eps0 permitted by the theorem hypothesis W2(p0,p*) <= 3X < eps0,
  // nudged one ulp to keep the inequality strict.
  double eps0 = std::nextafter(3.0 * X, std::numeric_limits<double>::infinity());
  if (spec.eps >= eps0)
    throw planning_error("plan_epochs: target eps >= initial-error bound 3(d/m + D2); "
                         "nothing to schedule");
  int ell = static_cast<int>(std::ceil(std::log(eps0 / spec.eps) / std::log(2.0)));
  double delta1 = eps0 / (208.0 * kappa) * std::sqrt(1.0 / X);
  if (delta1 >= 1.0)
    throw planning_error("plan_epochs: initial step size >= 1");
  std::uint64_t n1 =
      ceil_iterations((208.0 * kappa * kappa / eps0) * std::sqrt(X) * std::log(16.0));

  EpochSchedule sched;
  sched.eps0 = eps0;
  sched.ell = ell;
  double d_i = delta1;
  std::uint64_t n_i = n1;
  for (int i = 0; i < ell; ++i) {
    sched.epochs.emplace_back(d_i, n_i);
    d_i /= 2.0;
    n_i *= 2;
  }

  // Paper bound plus the slack the ceiling on n1 can add (one extra step per epoch
  // doubling, at most 2^ell total).
  double total_bound = (416.0 * std::log(16.0) * kappa * kappa / spec.eps) * std::sqrt(X) +
                       std::pow(2.0, ell);
  if (static_cast<double>(sched.total_steps()) > total_bound + 1.0)
    throw std::logic_error("plan_epochs: total steps exceed the theorem bound");
  return sched;
}

double kinetic_energy_bound(const ProblemSpec& spec) {
  validate(spec);
  return 26.0 * spec.moment_scale();
}

double initial_distance_bound(const ProblemSpec& spec) {
  validate(spec);
  return 3.0 * spec.moment_scale();
}

double recursion_bound(double A, double B, double C, double x0, std::uint64_t k) {
  if (!(A >= 0.0) || A >= 1.0)
    throw std::invalid_argument("recursion_bound: require A in [0,1)");
  if (!(B >= 0.0) || !(C >= 0.0) || !(x0 >= 0.0))
    throw std::invalid_argument("recursion_bound: require B, C, x0 >= 0");
  double geom = std::pow(A, static_cast<double>(k)) * x0;
  double noise = B > 0.0 ? B * B / (C + std::sqrt(1.0 - A * A) * B) : 0.0;
  return geom + C / (1.0 - A) + noise;
}

}  // namespace klmc
