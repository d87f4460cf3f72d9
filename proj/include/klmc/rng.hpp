// Reproducible random streams. Each chain owns a NormalStream whose seed is
// derived from (master seed, chain index, epoch index), so ensemble output is
// independent of thread scheduling and runs are replayable.
#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace klmc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t chain,
                                        std::uint64_t epoch) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= chain + 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  s ^= epoch + 0xd1b54a32d192ed03ULL;
  std::uint64_t c = splitmix64(s);
  return a ^ (b * 0xff51afd7ed558ccdULL) ^ (c * 0xc4ceb9fe1a85ec53ULL);
}

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }

  void fill_normal(std::span<double> out) {
    for (double& x : out) x = normal_(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace klmc
