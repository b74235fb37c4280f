#pragma once

#include <array>
#include <cstdint>

namespace qpg {

// xoshiro256++ seeded through splitmix64. Substreams are derived by
// hashing (seed, stream ids) with mix64, so per-episode / per-instance
// streams stay reproducible no matter how work is scheduled.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double next_double();                    // uniform [0, 1)
  double uniform(double lo, double hi);
  int next_int(int n);                     // uniform over {0, ..., n-1}

private:
  std::array<std::uint64_t, 4> state_;
};

std::uint64_t splitmix64(std::uint64_t& x);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

}  // namespace qpg
