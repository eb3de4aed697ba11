#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wcost/coupling.hpp"
#include "wcost/distributions.hpp"
#include "wcost/sample.hpp"

namespace wcost {

/// E: quantiles agree on the interval. D: they differ everywhere inside it.
enum class Region { E, D };

/// Breakpoints 0 = u_0 < ... < u_k = 1 with one label per interval (u_{i-1}, u_i).
struct Partition {
  std::vector<double> breaks{0.0, 1.0};
  std::vector<Region> labels{Region::E};

  static Partition whole(Region r);
  Region at(double u) const;
  bool all(Region r) const;
  bool any(Region r) const;
  Region first() const { return labels.front(); }
  Region last() const { return labels.back(); }
  std::string describe() const;
};

struct PairSpec {
  DistSpec x;
  DistSpec y;
  CouplingSpec coupling;
  Partition partition;

  bool same_marginals() const { return partition.all(Region::E); }
};

/// tau(u) = F^{-1}(u) - G^{-1}(u).
double quantile_difference(const PairSpec& pair, double u);
/// tau(1 - q), accurate for tiny q.
double quantile_difference_upper(const PairSpec& pair, double q);

/// Checks the declared partition: |tau| <= 1e-10 on E intervals, tau != 0 inside
/// D intervals, and tau(u_k) = 0 to 1e-8 at breakpoints adjacent to an E interval.
/// Throws ValidationError naming the interval.
void verify_partition(const PairSpec& pair, int probes = 1000);

/// n pairs from the joint law; deterministic in (pair, n, seed).
PairedSample sample_pairs(const PairSpec& pair, std::size_t n, std::uint64_t seed);

}  // namespace wcost
