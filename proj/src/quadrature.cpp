#include "wcost/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wcost/error.hpp"

namespace wcost::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, unsigned max_depth) {
  if (!(a <= b)) throw DomainError("integration bounds must satisfy a <= b");
  if (a == b) return {};
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol, &err);
  return {v, err};
}

std::vector<double> trapezoid_weights(std::span<const double> grid) {
  const std::size_t m = grid.size();
  std::vector<double> w(m, 0.0);
  if (m < 2) return w;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double half = 0.5 * (grid[i + 1] - grid[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

TailSeries tail_series(const std::function<double(double)>& g, double q_start, double q_min) {
  if (!(q_start > q_min && q_min > 0.0)) throw DomainError("tail series needs 0 < q_min < q_start");
  TailSeries ts;
  // Substituting q = exp(-t) turns each decade into a smooth interval of length log 10.
  const auto in_t = [&g](double t) {
    const double q = std::exp(-t);
    return g(q) * q;
  };
  double q_hi = q_start;
  while (q_hi / 10.0 >= q_min) {
    const double t_lo = -std::log(q_hi);
    const double inc = integrate(in_t, t_lo, t_lo + std::numbers::ln10, 1e-8, 6).value;
    ts.q.push_back(q_hi);
    ts.increments.push_back(inc);
    q_hi /= 10.0;
  }
  const std::size_t k = ts.increments.size();
  for (const double inc : ts.increments) ts.partial_sum += inc;

  if (k < 20) throw DomainError("tail series needs at least 20 decades between q_min and q_start");
  if (!std::isfinite(ts.partial_sum)) {
    ts.mode = "divergent";
    ts.remainder = std::numeric_limits<double>::infinity();
    return ts;
  }

  const std::size_t last = 10;
  const auto recent = std::span<const double>(ts.increments).last(last);
  if (std::all_of(recent.begin(), recent.end(), [](double v) { return v == 0.0; })) {
    ts.mode = "vanishing";
    ts.converges = true;
    return ts;
  }

  double max_ratio = 0.0;
  bool ratios_ok = true;
  for (std::size_t i = k - last; i < k; ++i) {
    const double prev = std::abs(ts.increments[i - 1]);
    const double cur = std::abs(ts.increments[i]);
    if (prev == 0.0) {
      ratios_ok = cur == 0.0;
      if (!ratios_ok) break;
      continue;
    }
    max_ratio = std::max(max_ratio, cur / prev);
  }
  if (ratios_ok && max_ratio < 0.9) {
    ts.mode = "geometric";
    ts.converges = true;
    ts.remainder = std::abs(ts.increments.back()) * max_ratio / (1.0 - max_ratio);
    return ts;
  }

  // Least-squares slope of log|increment| against log L over the last half.
  const std::size_t start = k / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = start; i < k; ++i) {
    const double inc = std::abs(ts.increments[i]);
    if (!(inc > 0.0)) continue;
    const double lx = std::log(-std::log(ts.q[i]) + 0.5 * std::numbers::ln10);
    const double ly = std::log(inc);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++cnt;
  }
  const double denom = static_cast<double>(cnt) * sxx - sx * sx;
  if (cnt < 5 || denom <= 0.0) {
    ts.mode = "divergent";
    ts.remainder = std::numeric_limits<double>::infinity();
    return ts;
  }
  ts.decay_exponent = -(static_cast<double>(cnt) * sxy - sx * sy) / denom;
  if (ts.decay_exponent > 1.05) {
    ts.mode = "power";
    ts.converges = true;
    const double l_last = -std::log(ts.q.back()) + std::numbers::ln10;
    ts.remainder = std::abs(ts.increments.back()) * l_last / ((ts.decay_exponent - 1.0) * std::numbers::ln10);
  } else {
    ts.mode = "divergent";
    ts.remainder = std::numeric_limits<double>::infinity();
  }
  return ts;
}

}  // namespace wcost::quad
