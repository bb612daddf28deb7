#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace setsens {

// Counter-derived seeding. A stream is identified by a master seed and a path
// of indices (replicate, grid point, permutation, ...); each index is folded
// into the state with one SplitMix64 round, so adding streams never perturbs
// existing ones.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

// Fixed stream labels used in seed paths.
enum class StreamTag : std::uint64_t {
  inputs = 0x11,
  inner_points = 0x22,
  permutations = 0x33,
  pair_points = 0x44,
  replicate = 0x55,
};

inline std::uint64_t tag(StreamTag t) noexcept { return static_cast<std::uint64_t>(t); }

// Thin wrapper over mt19937_64 whose derived draws do not depend on the
// standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
};

}  // namespace setsens
