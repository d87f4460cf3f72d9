// Ensemble runner for the underdamped Langevin MCMC algorithm: M independent
// chains advanced n steps (or across an epoch schedule), each chain driven by
// its own stream derived from (master seed, chain, epoch). Chains are advanced
// by an OpenMP-parallel kernel; a serial path with identical output is kept
// for testing (cfg.parallel = false).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klmc/planner.hpp"
#include "klmc/target.hpp"

namespace klmc {

struct EnsembleState {
  int dim = 0;
  int chains = 0;
  std::vector<double> x;  // chains*dim, chain-major
  std::vector<double> v;

  std::span<double> chain_x(int c) { return {x.data() + static_cast<std::size_t>(c) * dim, static_cast<std::size_t>(dim)}; }
  std::span<double> chain_v(int c) { return {v.data() + static_cast<std::size_t>(c) * dim, static_cast<std::size_t>(dim)}; }
  std::span<const double> chain_x(int c) const { return {x.data() + static_cast<std::size_t>(c) * dim, static_cast<std::size_t>(dim)}; }
  std::span<const double> chain_v(int c) const { return {v.data() + static_cast<std::size_t>(c) * dim, static_cast<std::size_t>(dim)}; }
};

struct EnsembleSnapshot {
  std::uint64_t iteration = 0;
  EnsembleState state;
  double wall_ms = 0.0;  // in-memory only; excluded from serialized traces
};

struct SnapshotDiagnostics {
  std::uint64_t iteration = 0;
  double mean_v2 = 0.0;               // mean over chains of ||v||^2
  std::vector<double> mean_x;         // per coordinate
  std::vector<double> var_x;          // per coordinate, unbiased
};

struct RunConfig {
  TargetModel target;
  std::optional<SamplerPlan> plan;          // used by run()
  std::optional<EpochSchedule> schedule;    // used by run_epochs()
  int chains = 1;                           // M
  std::vector<double> x0;                   // empty: minimizer if known, else origin
  std::uint64_t seed = 0;
  // Snapshot every stride-th iterate; 0 picks the smallest stride keeping
  // snapshot storage near 100 MB.
  std::uint64_t stride = 0;
  double sigma2 = 0.0;                      // >0 requires plan mode stochastic
  bool parallel = true;
};

struct Trace {
  int dim = 0;
  int chains = 0;
  std::uint64_t seed = 0;
  std::uint64_t stride = 1;
  double sigma2 = 0.0;
  std::vector<std::pair<double, std::uint64_t>> epochs;  // schedule actually run
  std::vector<EnsembleSnapshot> snapshots;
  std::vector<SnapshotDiagnostics> diagnostics;
};

// Snapshot layout: the initial ensemble, every stride-th iterate within each
// epoch, and each epoch's final iterate. Gradients are evaluated once per
// step at the pre-step position.
Trace run(const RunConfig& cfg);
Trace run_epochs(const RunConfig& cfg);

SnapshotDiagnostics compute_diagnostics(std::uint64_t iteration, const EnsembleState& st);

}  // namespace klmc
