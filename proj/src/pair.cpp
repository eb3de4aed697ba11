#include "wcost/pair.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wcost/error.hpp"

namespace wcost {

Partition Partition::whole(Region r) { return Partition{{0.0, 1.0}, {r}}; }

Region Partition::at(double u) const {
  const auto it = std::upper_bound(breaks.begin() + 1, breaks.end() - 1, u);
  return labels[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

bool Partition::all(Region r) const {
  return std::all_of(labels.begin(), labels.end(), [r](Region l) { return l == r; });
}

bool Partition::any(Region r) const {
  return std::any_of(labels.begin(), labels.end(), [r](Region l) { return l == r; });
}

std::string Partition::describe() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k) os << ' ';
    os << (labels[k] == Region::E ? 'E' : 'D') << '(' << breaks[k] << ',' << breaks[k + 1] << ')';
  }
  return os.str();
}

double quantile_difference(const PairSpec& pair, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile difference requires u in (0,1)");
  return pair.x.quantile(u) - pair.y.quantile(u);
}

double quantile_difference_upper(const PairSpec& pair, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile difference requires q in (0,1)");
  return pair.x.quantile_upper(q) - pair.y.quantile_upper(q);
}

void verify_partition(const PairSpec& pair, int probes) {
  const Partition& p = pair.partition;
  if (p.breaks.size() < 2 || p.labels.size() + 1 != p.breaks.size()) {
    throw ValidationError("partition needs k+1 breakpoints for k labels");
  }
  if (p.breaks.front() != 0.0 || p.breaks.back() != 1.0) throw ValidationError("partition must span [0,1]");
  for (std::size_t k = 1; k < p.breaks.size(); ++k) {
    if (!(p.breaks[k] > p.breaks[k - 1])) throw ValidationError("partition breakpoints must be strictly increasing");
  }
  const auto fail = [&](std::size_t k, const std::string& what, double u) {
    std::ostringstream os;
    os << "(FG0) violated on interval " << k + 1 << " (" << p.breaks[k] << ", " << p.breaks[k + 1]
       << "): " << what << " at u = " << u;
    throw ValidationError(os.str());
  };
  for (std::size_t k = 0; k < p.labels.size(); ++k) {
    const double a = p.breaks[k], b = p.breaks[k + 1];
    for (int i = 1; i <= probes; ++i) {
      const double u = a + (b - a) * i / (probes + 1.0);
      const double tau = quantile_difference(pair, u);
      if (p.labels[k] == Region::E && std::abs(tau) > 1e-10) fail(k, "E interval with |tau| > 1e-10", u);
      if (p.labels[k] == Region::D && tau == 0.0) fail(k, "D interval with tau = 0", u);
    }
  }
  for (std::size_t k = 1; k + 1 < p.breaks.size(); ++k) {
    if (p.labels[k - 1] != Region::E && p.labels[k] != Region::E) continue;
    const double u = p.breaks[k];
    const double tau = quantile_difference(pair, u);
    if (std::abs(tau) > 1e-8 * std::max(1.0, std::abs(pair.x.quantile(u)))) {
      fail(k, "quantiles differ at a breakpoint", u);
    }
  }
}

PairedSample sample_pairs(const PairSpec& pair, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_pairs requires n >= 1");
  Rng rng(seed);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const UniformPair uv = pair.coupling.sample(rng);
    xs[i] = pair.x.quantile_split(uv.u, uv.u_c);
    ys[i] = pair.y.quantile_split(uv.v, uv.v_c);
  }
  std::ostringstream prov;
  prov << "simulated:seed=" << seed;
  return PairedSample(std::move(xs), std::move(ys), prov.str());
}

}  // namespace wcost
