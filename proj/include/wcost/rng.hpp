#pragma once

#include <cstdint>

namespace wcost {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th independent stream under `master`. Used for every
/// per-draw and per-replication stream so results do not depend on how work is
/// split across threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// xoshiro256** with portable uniform and normal variates.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  /// Standard normal (Marsaglia polar method).
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wcost
