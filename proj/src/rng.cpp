#include "rrcov/rng.hpp"

#include <cmath>

namespace rrcov {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
  // Hash the pair first so that nearby (seed, index) pairs land far apart.
  std::uint64_t key = master_seed;
  const std::uint64_t seed_mix = splitmix64(key);
  std::uint64_t sm = seed_mix ^ (stream_index * 0xD1B54A32D192ED03ULL);
  sm = splitmix64(sm);
  for (auto& word : state_) word = splitmix64(sm);
  // All-zero state is the one forbidden xoshiro state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform_open() - 1.0;
    v = 2.0 * uniform_open() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

}  // namespace rrcov
