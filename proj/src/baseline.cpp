#include "klmc/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "klmc/common.hpp"
#include "klmc/rng.hpp"

namespace klmc {

void ula_step(const TargetModel& target, std::span<double> x, double delta,
              NormalStream& stream) {
  if (!(delta > 0.0)) throw std::invalid_argument("ula_step: delta must be > 0");
  if (static_cast<int>(x.size()) != target.dim)
    throw std::invalid_argument("ula_step: dimension mismatch");
  std::vector<double> g(target.dim);
  target.gradient(x, g);
  double noise = std::sqrt(2.0 * delta);
  for (int j = 0; j < target.dim; ++j) x[j] += -delta * g[j] + noise * stream.normal();
}

Trace ula_run(const RunConfig& cfg) {
  if (!cfg.plan.has_value()) throw std::invalid_argument("ula_run: config carries no plan");
  const TargetModel& target = cfg.target;
  if (cfg.chains < 1) throw std::invalid_argument("ula_run: ensemble size must be >= 1");

  std::vector<double> x0 = cfg.x0;
  if (x0.empty()) x0 = target.minimizer.value_or(std::vector<double>(target.dim, 0.0));
  if (static_cast<int>(x0.size()) != target.dim)
    throw std::invalid_argument("ula_run: x0 dimension mismatch");

  double delta = cfg.plan->delta;
  std::uint64_t n = cfg.plan->n;
  if (n > 0 && !(delta > 0.0)) throw std::invalid_argument("ula_run: delta must be > 0");
  std::uint64_t stride = cfg.stride ? cfg.stride : 1;
  if (cfg.stride == 0) {
    double bytes_per_snap = static_cast<double>(cfg.chains) * target.dim * 2.0 * 8.0;
    double max_snaps = std::max(2.0, 100.0e6 / bytes_per_snap);
    stride = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(n / (max_snaps - 1.0))));
  }

  std::vector<std::uint64_t> record;
  record.push_back(0);
  for (std::uint64_t k = stride; k < n + stride; k += stride) {
    std::uint64_t it = std::min(k, n);
    if (it == 0) continue;
    record.push_back(it);
    if (it == n) break;
  }

  Trace trace;
  trace.dim = target.dim;
  trace.chains = cfg.chains;
  trace.seed = cfg.seed;
  trace.stride = stride;
  trace.sigma2 = 0.0;
  if (n > 0) trace.epochs.emplace_back(delta, n);
  trace.snapshots.resize(record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    trace.snapshots[i].iteration = record[i];
    trace.snapshots[i].state.dim = target.dim;
    trace.snapshots[i].state.chains = cfg.chains;
    trace.snapshots[i].state.x.resize(static_cast<std::size_t>(target.dim) * cfg.chains);
    trace.snapshots[i].state.v.resize(static_cast<std::size_t>(target.dim) * cfg.chains, 0.0);
  }

  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> diverged(cfg.chains, 0);
  auto advance = [&](int c) {
    NormalStream stream(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(c), 0));
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> g(target.dim);
    double noise = std::sqrt(2.0 * delta);
    std::copy(x.begin(), x.end(), trace.snapshots[0].state.chain_x(c).begin());
    std::size_t next = 1;
    for (std::uint64_t k = 1; k <= n; ++k) {
      target.gradient(x, g);
      for (int j = 0; j < target.dim; ++j) x[j] += -delta * g[j] + noise * stream.normal();
      if (!all_finite(x)) {
        diverged[c] = k;
        return;
      }
      if (next < record.size() && record[next] == k) {
        std::copy(x.begin(), x.end(), trace.snapshots[next].state.chain_x(c).begin());
        ++next;
      }
    }
  };

  if (cfg.parallel) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < cfg.chains; ++c) advance(c);
  } else {
    for (int c = 0; c < cfg.chains; ++c) advance(c);
  }

  int bad = -1;
  for (int c = 0; c < cfg.chains; ++c)
    if (diverged[c] && (bad < 0 || diverged[c] < diverged[bad])) bad = c;
  if (bad >= 0)
    throw divergence_error("ULA chain " + std::to_string(bad) + " diverged at iteration " +
                               std::to_string(diverged[bad]),
                           bad, diverged[bad]);

  double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (auto& s : trace.snapshots) s.wall_ms = wall_ms;
  for (const auto& s : trace.snapshots)
    trace.diagnostics.push_back(compute_diagnostics(s.iteration, s.state));
  return trace;
}

}  // namespace klmc
