#include "common.hpp"

#include "wcost/error.hpp"

namespace wcost::kernels::scalar {

using detail::Compensated;
using detail::power_cost;

double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c) {
  if (x.size() != y.size()) throw ValidationError("cost_sum: length mismatch");
  Compensated acc;
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(power_cost(x[i] - y[i], c));
  return acc.value();
}

double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c) {
  if (v.size() != w.size()) throw ValidationError("weighted_cost_sum: length mismatch");
  Compensated acc;
  for (std::size_t i = 0; i < v.size(); ++i) acc.add(w[i] * power_cost(v[i], c));
  return acc.value();
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("dot: length mismatch");
  Compensated acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out) {
  const std::size_t m = out.size();
  if (bx.size() != m || by.size() != m || sx.size() != m || sy.size() != m) {
    throw ValidationError("bridge_difference: length mismatch");
  }
  for (std::size_t i = 0; i < m; ++i) out[i] = bx[i] * sx[i] - by[i] * sy[i];
}

}  // namespace wcost::kernels::scalar
