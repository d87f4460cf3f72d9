// Overdamped Langevin (ULA) baseline: x <- x - delta grad f(x) + sqrt(2 delta) zeta.
// Shares the ensemble/trace machinery of the underdamped sampler so the two
// can be compared head to head.
#pragma once

#include <span>

#include "klmc/sampler.hpp"

namespace klmc {

// One ULA update in place.
void ula_step(const TargetModel& target, std::span<double> x, double delta,
              NormalStream& stream);

// Ensemble ULA run with the same seeding, snapshot and trace layout as run().
// Velocities in the trace are identically zero.
Trace ula_run(const RunConfig& cfg);

}  // namespace klmc
