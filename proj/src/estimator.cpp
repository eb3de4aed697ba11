#include "wcost/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kernels/common.hpp"
#include "wcost/error.hpp"
#include "wcost/quadrature.hpp"

namespace wcost {
namespace {

using kernels::detail::Compensated;

/// int_0^width g(q) dq for g with an integrable singularity at q = 0,
/// summed over decades until the increments stop mattering.
double endpoint_integral(const std::function<double(double)>& g, double width) {
  Compensated acc;
  double hi = width;
  for (int k = 0; k < 300; ++k) {
    const double lo = hi / 10.0;
    const double inc = quad::integrate(g, lo, hi, 1e-11, 10).value;
    acc.add(inc);
    if (k >= 3 && std::abs(inc) <= 1e-17 * std::abs(acc.value())) break;
    hi = lo;
  }
  return acc.value();
}

}  // namespace

double w_cost_sorted(std::span<const double> sx, std::span<const double> sy, const CostSpec& cost) {
  const std::size_t n = sx.size();
  if (n == 0 || sy.size() != n) throw ValidationError("estimator requires two sorted samples of equal size n >= 1");
  double total;
  if (cost.power) {
    total = kernels::cost_sum(sx, sy, *cost.power);
  } else {
    Compensated acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(evaluate(cost, sx[i] - sy[i]));
    total = acc.value();
  }
  if (std::isinf(total)) {
    warn("empirical cost overflowed to infinity: the sample tails are too heavy for this cost's growth");
  }
  return total / static_cast<double>(n);
}

double w_cost_empirical(const PairedSample& sample, const CostSpec& cost) {
  return w_cost_sorted(sample.sorted_xs(), sample.sorted_ys(), cost);
}

PopulationValue w_cost_population(const PairSpec& pair, const CostSpec& cost, const QuadratureSpec& quad) {
  const double delta = quad.delta;
  if (!(delta > 0.0 && delta < 1e-3)) throw ValidationError("population quadrature requires 0 < delta < 1e-3");
  PopulationValue out;
  out.delta = delta;

  // Interior: split at the partition breakpoints so kinks of tau sit on panel edges.
  std::vector<double> cuts{delta};
  for (std::size_t k = 1; k + 1 < pair.partition.breaks.size(); ++k) cuts.push_back(pair.partition.breaks[k]);
  cuts.push_back(0.5);
  cuts.push_back(1.0 - delta);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto integrand = [&](double u) { return evaluate(cost, quantile_difference(pair, u)); };
  Compensated interior;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto r = quad::integrate(integrand, cuts[i], cuts[i + 1], quad.rel_tol, 15);
    interior.add(r.value);
    out.quad_error += r.error;
  }
  out.interior = interior.value();

  const auto tail = [&](bool upper) {
    const auto g = [&](double q) {
      const double tau = upper ? quantile_difference_upper(pair, q) : quantile_difference(pair, q);
      return evaluate(cost, tau);
    };
    const quad::TailSeries ts = quad::tail_series(g, delta);
    const char* name = upper ? "upper tail (u -> 1)" : "lower tail (u -> 0)";
    if (!ts.converges) {
      std::ostringstream os;
      os << "population cost integral diverges in the " << name << ": decade increments follow mode '" << ts.mode
         << "' with fitted decay exponent " << ts.decay_exponent;
      throw IntegrabilityError(os.str());
    }
    if (ts.remainder > quad.tail_tolerance) {
      std::ostringstream os;
      os << "population cost integral: extrapolated mass " << ts.remainder << " in the " << name
         << " exceeds tolerance " << quad.tail_tolerance;
      throw IntegrabilityError(os.str());
    }
    return ts.total();
  };
  out.tail_lower = tail(false);
  out.tail_upper = tail(true);
  out.value = out.interior + out.tail_lower + out.tail_upper;
  return out;
}

double w1_cdf_distance(const PairedSample& sample) {
  const auto& xs = sample.sorted_xs();
  const auto& ys = sample.sorted_ys();
  const std::size_t n = xs.size();
  if (n == 0) throw ValidationError("w1_cdf_distance requires n >= 1");
  // Walk the merged breakpoints; |F_n - G_n| = |i - j| / n between them.
  Compensated acc;
  std::size_t i = 0, j = 0;
  double prev = std::min(xs.front(), ys.front());
  while (i < n || j < n) {
    const double next = (j == n || (i < n && xs[i] <= ys[j])) ? xs[i] : ys[j];
    const double gap = static_cast<double>(i > j ? i - j : j - i);
    if (gap > 0.0) acc.add(gap * (next - prev));
    prev = next;
    while (i < n && xs[i] == next) ++i;
    while (j < n && ys[j] == next) ++j;
  }
  return acc.value() / static_cast<double>(n);
}

double empirical_quantile(std::span<const double> sorted, double u) {
  if (!(u > 0.0 && u <= 1.0)) throw DomainError("empirical quantile requires u in (0,1]");
  const std::size_t n = sorted.size();
  if (n == 0) throw ValidationError("empirical quantile of an empty sample");
  const double pos = std::ceil(static_cast<double>(n) * u);
  const std::size_t idx = std::clamp<std::size_t>(static_cast<std::size_t>(pos), 1, n);
  return sorted[idx - 1];
}

std::vector<std::pair<double, double>> quantile_process(const PairedSample& sample, const PairSpec& pair,
                                                        std::span<const double> grid) {
  const double rn = std::sqrt(static_cast<double>(sample.size()));
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (const double u : grid) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile process grid must lie in (0,1)");
    out.emplace_back(rn * (empirical_quantile(sample.sorted_xs(), u) - pair.x.quantile(u)),
                     rn * (empirical_quantile(sample.sorted_ys(), u) - pair.y.quantile(u)));
  }
  return out;
}

double wp_one_sample(std::span<const double> sorted, const DistSpec& null, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ValidationError("one-sample statistic requires n >= 1");
  if (!(p >= 1.0)) throw ValidationError("one-sample statistic requires p >= 1");
  const double dn = static_cast<double>(n);
  const auto pw = [p](double d) { return kernels::detail::branch_power(std::abs(d), p); };
  Compensated acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sorted[i];
    const double a = static_cast<double>(i) / dn;
    const double b = static_cast<double>(i + 1) / dn;
    if (n == 1) {
      acc.add(endpoint_integral([&](double q) { return pw(x - null.quantile(q)); }, 0.5));
      acc.add(endpoint_integral([&](double q) { return pw(x - null.quantile_upper(q)); }, 0.5));
      break;
    }
    if (i == 0) {
      acc.add(endpoint_integral([&](double q) { return pw(x - null.quantile(q)); }, b));
      continue;
    }
    if (i + 1 == n) {
      acc.add(endpoint_integral([&](double q) { return pw(x - null.quantile_upper(q)); }, 1.0 - a));
      continue;
    }
    const auto f = [&](double u) { return pw(x - null.quantile(u)); };
    const double cross = null.cdf(x);
    if (cross > a && cross < b) {
      acc.add(quad::integrate(f, a, cross, 1e-11, 8).value);
      acc.add(quad::integrate(f, cross, b, 1e-11, 8).value);
    } else {
      acc.add(quad::integrate(f, a, b, 1e-11, 8).value);
    }
  }
  return acc.value();
}

}  // namespace wcost
