#pragma once

#include <cmath>

#include "wcost/kernels.hpp"

namespace wcost::kernels::detail {

/// Neumaier's variant of Kahan summation.
struct Compensated {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) noexcept {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

inline double branch_power(double a, double e) noexcept {
  if (e == 1.0) return a;
  if (e == 2.0) return a * a;
  return std::pow(a, e);
}

inline double power_cost(double d, const PowerCost& c) noexcept {
  if (d > 0.0) return c.coef_plus * branch_power(d, c.exp_plus);
  if (d < 0.0) return c.coef_minus * branch_power(-d, c.exp_minus);
  return 0.0;
}

/// Exponents the vector kernels evaluate without a pow call.
enum class ExpClass { one, two, half_integer, small_integer, general };

inline ExpClass classify_exponent(double e) noexcept {
  if (e == 1.0) return ExpClass::one;
  if (e == 2.0) return ExpClass::two;
  const double twice = 2.0 * e;
  if (twice == std::floor(twice) && twice > 0.0 && twice <= 17.0) {
    return (twice == std::floor(e) * 2.0) ? ExpClass::small_integer : ExpClass::half_integer;
  }
  return ExpClass::general;
}

}  // namespace wcost::kernels::detail
