#include "klmc/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "klmc/common.hpp"

namespace klmc {

namespace {

struct StepGrid {
  std::uint64_t n;
  double h;  // uniform step, lands exactly on t_end
};

StepGrid make_grid(double t_end, double h) {
  if (!(t_end > 0.0) || !(h > 0.0))
    throw std::invalid_argument("integrate: require t_end > 0 and h > 0");
  if (h > t_end / 64.0)
    throw std::invalid_argument("integrate: fine step must satisfy h <= t_end/64");
  auto n = static_cast<std::uint64_t>(std::ceil(t_end / h - 1e-9));
  return {n, t_end / static_cast<double>(n)};
}

// One Euler-Maruyama micro-step: the velocity update uses the supplied drift
// gradient, the position update uses the fresh velocity.
inline void em_step(std::span<double> x, std::span<double> v, std::span<const double> g,
                    double u, double h, double noise_scale, const double* zeta) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    v[j] += h * (-2.0 * v[j] - u * g[j]) + noise_scale * zeta[j];
    x[j] += h * v[j];
  }
}

ChainState integrate(const TargetModel& target, const ChainState& start, double t_end,
                     double h, std::span<const double> increments, bool frozen) {
  int d = target.dim;
  if (static_cast<int>(start.x.size()) != d || static_cast<int>(start.v.size()) != d)
    throw std::invalid_argument("integrate: state dimension mismatch");
  StepGrid grid = make_grid(t_end, h);
  if (increments.size() < grid.n * static_cast<std::size_t>(d))
    throw std::invalid_argument("integrate: increment buffer shorter than t_end/h steps");

  ChainState s = start;
  std::vector<double> g(d);
  double u = 1.0 / target.L;
  double noise_scale = std::sqrt(4.0 * grid.h / target.L);  // sqrt(2*gamma*u*h)
  if (frozen) target.gradient(s.x, g);
  for (std::uint64_t k = 0; k < grid.n; ++k) {
    if (!frozen) target.gradient(s.x, g);
    em_step(s.x, s.v, g, u, grid.h, noise_scale, increments.data() + k * d);
  }
  return s;
}

}  // namespace

ChainState integrate_exact_sde(const TargetModel& target, const ChainState& start,
                               double t_end, double h, std::span<const double> increments) {
  return integrate(target, start, t_end, h, increments, /*frozen=*/false);
}

ChainState integrate_frozen_sde(const TargetModel& target, const ChainState& start,
                                double t_end, double h, std::span<const double> increments) {
  return integrate(target, start, t_end, h, increments, /*frozen=*/true);
}

std::vector<LyapunovSample> contraction_experiment(const TargetModel& target,
                                                   const CoupledPair& pair0, double t_end,
                                                   double h, int n_samples,
                                                   NormalStream& stream) {
  int d = target.dim;
  if (static_cast<int>(pair0.a.x.size()) != d || static_cast<int>(pair0.b.x.size()) != d)
    throw std::invalid_argument("contraction_experiment: pair dimension mismatch");
  if (n_samples < 1) throw std::invalid_argument("contraction_experiment: n_samples >= 1");
  StepGrid grid = make_grid(t_end, h);

  auto lyapunov = [d](const ChainState& a, const ChainState& b) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      double z = a.x[j] - b.x[j];
      double zp = z + (a.v[j] - b.v[j]);
      s += z * z + zp * zp;
    }
    return s;
  };

  ChainState a = pair0.a, b = pair0.b;
  std::vector<double> ga(d), gb(d), zeta(d);
  double u = 1.0 / target.L;
  double noise_scale = std::sqrt(4.0 * grid.h / target.L);

  std::vector<LyapunovSample> out;
  out.reserve(n_samples + 1);
  out.push_back({0.0, lyapunov(a, b)});
  std::uint64_t next_sample = 1;
  for (std::uint64_t k = 0; k < grid.n; ++k) {
    // Single increment buffer per step, shared by both chains.
    stream.fill_normal(zeta);
    target.gradient(a.x, ga);
    target.gradient(b.x, gb);
    em_step(a.x, a.v, ga, u, grid.h, noise_scale, zeta.data());
    em_step(b.x, b.v, gb, u, grid.h, noise_scale, zeta.data());
    // Sample at evenly spaced times, always including t_end.
    while (next_sample <= static_cast<std::uint64_t>(n_samples) &&
           (k + 1) * static_cast<std::uint64_t>(n_samples) >= next_sample * grid.n) {
      out.push_back({(k + 1) * grid.h, lyapunov(a, b)});
      ++next_sample;
    }
  }
  return out;
}

DiscretizationResult discretization_experiment(const TargetModel& target,
                                               const EnsembleState& p0, double delta,
                                               double h, double energy_bound,
                                               std::uint64_t seed, bool parallel) {
  int d = target.dim;
  if (p0.dim != d) throw std::invalid_argument("discretization_experiment: dim mismatch");
  StepGrid grid = make_grid(delta, h);
  std::uint64_t n_fine = 2 * grid.n;  // generate at h/2 resolution, pair-sum for h

  double sum_sq = 0.0, sum_sq_h2 = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum_sq, sum_sq_h2) if (parallel)
  for (int c = 0; c < p0.chains; ++c) {
    NormalStream stream(derive_stream_seed(seed, static_cast<std::uint64_t>(c), 0));
    std::vector<double> fine(n_fine * d);
    stream.fill_normal(fine);
    // Coarse increments representing the same Brownian path at step h.
    std::vector<double> coarse(grid.n * d);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::uint64_t k = 0; k < grid.n; ++k)
      for (int j = 0; j < d; ++j)
        coarse[k * d + j] =
            (fine[2 * k * d + j] + fine[(2 * k + 1) * d + j]) * inv_sqrt2;

    ChainState start;
    auto xs = p0.chain_x(c);
    auto vs = p0.chain_v(c);
    start.x.assign(xs.begin(), xs.end());
    start.v.assign(vs.begin(), vs.end());

    ChainState ex = integrate_exact_sde(target, start, delta, grid.h, coarse);
    ChainState fr = integrate_frozen_sde(target, start, delta, grid.h, coarse);
    ChainState ex2 = integrate_exact_sde(target, start, delta, grid.h / 2.0, fine);
    ChainState fr2 = integrate_frozen_sde(target, start, delta, grid.h / 2.0, fine);

    double s = 0.0, s2 = 0.0;
    for (int j = 0; j < d; ++j) {
      double dx = ex.x[j] - fr.x[j], dv = ex.v[j] - fr.v[j];
      s += dx * dx + dv * dv;
      double dx2 = ex2.x[j] - fr2.x[j], dv2 = ex2.v[j] - fr2.v[j];
      s2 += dx2 * dx2 + dv2 * dv2;
    }
    sum_sq += s;
    sum_sq_h2 += s2;
  }

  DiscretizationResult res;
  res.measured = std::sqrt(sum_sq / p0.chains);
  res.measured_h2 = std::sqrt(sum_sq_h2 / p0.chains);
  res.bound = delta * delta * std::sqrt(2.0 * energy_bound / 5.0);
  return res;
}

}  // namespace klmc
