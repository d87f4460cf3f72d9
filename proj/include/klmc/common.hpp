// Shared error types and small helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace klmc {

// Thrown when a requested accuracy cannot be planned (e.g. the theorem
// formula yields a step size >= 1).
class planning_error : public std::runtime_error {
 public:
  explicit planning_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a chain produces a non-finite coordinate.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(std::string what, std::int64_t chain, std::uint64_t iteration)
      : std::runtime_error(std::move(what)), chain(chain), iteration(iteration) {}
  std::int64_t chain;
  std::uint64_t iteration;
};

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace klmc
