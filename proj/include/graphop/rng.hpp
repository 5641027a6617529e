#pragma once

#include <cstdint>

// Deterministic random streams. Every random quantity in the library is
// derived from one root seed split hierarchically (command -> tuple ->
// signal -> draw), so results are reproducible bit for bit regardless of
// scheduling or thread count. std:: distributions are avoided on purpose:
// their output is implementation-defined.

namespace graphop {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Child seed for the stream identified by `tag`. Chain calls to split along
// several axes: split_seed(split_seed(seed, k), tuple_index).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ ((tag + 1) * 0xff51afd7ed558ccdull);
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1), 53 mantissa bits
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // uniform in {0, ..., n-1}; intended for small n (modulo bias is ~n/2^64)
  int next_index(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  Rng split(std::uint64_t tag) const { return Rng(split_seed(state_, tag)); }

 private:
  std::uint64_t state_;
};

}  // namespace graphop
