#include "klmc/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "klmc/common.hpp"
#include "klmc/kernel.hpp"
#include "klmc/rng.hpp"

namespace klmc {

namespace {

struct SnapshotPoint {
  std::uint64_t global_iteration;
  int epoch;                 // epoch the recording falls in (-1: initial state)
  std::uint64_t local_step;  // step count within that epoch (0 for initial)
};

// Initial state, every stride-th iterate within an epoch, and each epoch's
// final iterate.
std::vector<SnapshotPoint> snapshot_points(
    const std::vector<std::pair<double, std::uint64_t>>& epochs, std::uint64_t stride) {
  std::vector<SnapshotPoint> pts;
  pts.push_back({0, -1, 0});
  std::uint64_t global = 0;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    std::uint64_t n = epochs[e].second;
    for (std::uint64_t k = stride; k < n + stride; k += stride) {
      std::uint64_t local = std::min(k, n);
      if (local == 0) continue;
      pts.push_back({global + local, static_cast<int>(e), local});
      if (local == n) break;
    }
    global += n;
  }
  return pts;
}

struct ChainFailure {
  std::uint64_t iteration = 0;
  bool failed = false;
};

void advance_chain(const RunConfig& cfg, const std::vector<std::pair<double, std::uint64_t>>& epochs,
                   const std::vector<KernelCoefficients>& coeffs,
                   const std::vector<SnapshotPoint>& points,
                   std::vector<EnsembleSnapshot>& snaps, int chain, ChainFailure& fail) {
  int d = cfg.target.dim;
  std::vector<double> x(cfg.x0.begin(), cfg.x0.end());
  std::vector<double> v(d, 0.0);  // the algorithm always starts at rest
  std::vector<double> g(d);
  std::vector<double> z(2 * d);
  double sig = cfg.sigma2 > 0.0 ? std::sqrt(cfg.sigma2) : 0.0;

  // points[0] is the initial state.
  {
    auto xs = snaps[0].state.chain_x(chain);
    auto vs = snaps[0].state.chain_v(chain);
    std::copy(x.begin(), x.end(), xs.begin());
    std::copy(v.begin(), v.end(), vs.begin());
  }

  std::size_t next_point = 1;
  std::uint64_t global = 0;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    NormalStream stream(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(chain), e));
    const KernelCoefficients& k = coeffs[e];
    std::uint64_t n = epochs[e].second;
    for (std::uint64_t s = 1; s <= n; ++s) {
      cfg.target.gradient(x, g);
      if (sig > 0.0)
        for (int j = 0; j < d; ++j) g[j] += sig * stream.normal();
      stream.fill_normal(z);
      apply_step(k, x, v, g, z);
      ++global;

      bool finite = all_finite(x) && all_finite(v);
      if (!finite) {
        fail.failed = true;
        fail.iteration = global;
        return;
      }
      if (next_point < points.size() && points[next_point].global_iteration == global) {
        auto xs = snaps[next_point].state.chain_x(chain);
        auto vs = snaps[next_point].state.chain_v(chain);
        std::copy(x.begin(), x.end(), xs.begin());
        std::copy(v.begin(), v.end(), vs.begin());
        ++next_point;
      }
    }
  }
}

Trace run_impl(const RunConfig& cfg, const std::vector<std::pair<double, std::uint64_t>>& epochs) {
  const TargetModel& target = cfg.target;
  if (target.dim < 1) throw std::invalid_argument("run: target dimension must be >= 1");
  if (cfg.chains < 1) throw std::invalid_argument("run: ensemble size must be >= 1");
  if (cfg.sigma2 < 0.0) throw std::invalid_argument("run: sigma2 must be >= 0");

  RunConfig local = cfg;
  if (local.stride == 0) {
    // Default stride: keep full-ensemble snapshot storage near 100 MB.
    std::uint64_t total = 0;
    for (const auto& [d, n] : epochs) total += n;
    double bytes_per_snap =
        static_cast<double>(local.chains) * target.dim * 2.0 * sizeof(double);
    double max_snaps = std::max(2.0, 100.0e6 / bytes_per_snap);
    local.stride = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(total / (max_snaps - 1.0))));
  }
  if (local.x0.empty())
    local.x0 = target.minimizer.value_or(std::vector<double>(target.dim, 0.0));
  if (static_cast<int>(local.x0.size()) != target.dim)
    throw std::invalid_argument("run: x0 dimension mismatch");
  if (!all_finite(local.x0)) throw std::invalid_argument("run: x0 must be finite");

  std::vector<KernelCoefficients> coeffs;
  coeffs.reserve(epochs.size());
  for (const auto& [delta, n] : epochs) coeffs.push_back(kernel_coefficients(delta, target.L));

  auto points = snapshot_points(epochs, local.stride);

  Trace trace;
  trace.dim = target.dim;
  trace.chains = local.chains;
  trace.seed = local.seed;
  trace.stride = local.stride;
  trace.sigma2 = local.sigma2;
  trace.epochs = epochs;
  trace.snapshots.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    trace.snapshots[i].iteration = points[i].global_iteration;
    trace.snapshots[i].state.dim = target.dim;
    trace.snapshots[i].state.chains = local.chains;
    trace.snapshots[i].state.x.resize(static_cast<std::size_t>(target.dim) * local.chains);
    trace.snapshots[i].state.v.resize(static_cast<std::size_t>(target.dim) * local.chains);
  }

  auto t0 = std::chrono::steady_clock::now();
  std::vector<ChainFailure> failures(local.chains);
  if (local.parallel) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < local.chains; ++c)
      advance_chain(local, epochs, coeffs, points, trace.snapshots, c, failures[c]);
  } else {
    for (int c = 0; c < local.chains; ++c)
      advance_chain(local, epochs, coeffs, points, trace.snapshots, c, failures[c]);
  }

  // Deterministic divergence report: smallest iteration, then smallest chain.
  int bad_chain = -1;
  std::uint64_t bad_iter = 0;
  for (int c = 0; c < local.chains; ++c) {
    if (!failures[c].failed) continue;
    if (bad_chain < 0 || failures[c].iteration < bad_iter) {
      bad_chain = c;
      bad_iter = failures[c].iteration;
    }
  }
  if (bad_chain >= 0)
    throw divergence_error("chain " + std::to_string(bad_chain) +
                               " diverged at iteration " + std::to_string(bad_iter),
                           bad_chain, bad_iter);

  double wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  for (auto& s : trace.snapshots) s.wall_ms = wall_ms;
  trace.diagnostics.reserve(trace.snapshots.size());
  for (const auto& s : trace.snapshots)
    trace.diagnostics.push_back(compute_diagnostics(s.iteration, s.state));
  return trace;
}

}  // namespace

SnapshotDiagnostics compute_diagnostics(std::uint64_t iteration, const EnsembleState& st) {
  SnapshotDiagnostics diag;
  diag.iteration = iteration;
  int d = st.dim, M = st.chains;
  diag.mean_x.assign(d, 0.0);
  diag.var_x.assign(d, 0.0);
  double v2 = 0.0;
  for (int c = 0; c < M; ++c) {
    auto xs = st.chain_x(c);
    auto vs = st.chain_v(c);
    for (int j = 0; j < d; ++j) {
      diag.mean_x[j] += xs[j];
      v2 += vs[j] * vs[j];
    }
  }
  for (int j = 0; j < d; ++j) diag.mean_x[j] /= M;
  diag.mean_v2 = v2 / M;
  if (M > 1) {
    for (int c = 0; c < M; ++c) {
      auto xs = st.chain_x(c);
      for (int j = 0; j < d; ++j) {
        double dx = xs[j] - diag.mean_x[j];
        diag.var_x[j] += dx * dx;
      }
    }
    for (int j = 0; j < d; ++j) diag.var_x[j] /= (M - 1);
  }
  return diag;
}

Trace run(const RunConfig& cfg) {
  if (!cfg.plan.has_value()) throw std::invalid_argument("run: config carries no plan");
  if (cfg.sigma2 > 0.0 && cfg.plan->mode != PlanMode::stochastic)
    throw std::invalid_argument("run: sigma2 > 0 requires a stochastic-mode plan");
  std::vector<std::pair<double, std::uint64_t>> epochs;
  if (cfg.plan->n > 0) epochs.emplace_back(cfg.plan->delta, cfg.plan->n);
  return run_impl(cfg, epochs);
}

Trace run_epochs(const RunConfig& cfg) {
  if (!cfg.schedule.has_value() || cfg.schedule->epochs.empty())
    throw std::invalid_argument("run_epochs: config carries no epoch schedule");
  if (cfg.sigma2 > 0.0)
    throw std::invalid_argument("run_epochs: epoch schedule assumes exact gradients");
  return run_impl(cfg, cfg.schedule->epochs);
}

}  // namespace klmc
