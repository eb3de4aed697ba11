#pragma once

// Closed-form means and variances used as independent references for the
// simulated limit laws. Each is derived by hand from the bridge covariance.

#include <cmath>
#include <numbers>

#include "wcost/distributions.hpp"
#include "wcost/quadrature.hpp"

namespace oracle {

/// sqrt(2/pi) = E|Z|.
inline double abs_normal_mean() { return std::sqrt(2.0 / std::numbers::pi); }

/// Variance of int 2 tau B du for N(0,1) against N(1,1) with the squared
/// cost: tau = -1 on (0,1) and B = B^X/h - B^Y/h with independent bridges,
/// so the variance is 4 * 2 * int int (min(u,v)-uv)/(h(u)h(v)) du dv = 8 Var(N(0,1)).
inline constexpr double sigma2_gauss_shift_squared = 8.0;

/// Pinball cost alpha under a location shift c > 0 of N(0,1): the derivative
/// is the constant (1-alpha) on (0,1), giving (1-alpha)^2 * 2.
inline double sigma2_pinball_shift(double alpha) { return (1.0 - alpha) * (1.0 - alpha) * 2.0; }

/// E int B_X^2 du for the uniform law is int u(1-u) du = 1/6; two independent
/// bridges give 1/3 for the squared difference.
inline constexpr double uniform_w2_mean = 1.0 / 3.0;

/// E int |B(u)|/h(u) du for one bridge = sqrt(2/pi) int sqrt(u(1-u))/h.
inline double one_sample_p1_mean(const wcost::DistSpec& d, double lo, double hi) {
  const auto r = wcost::quad::integrate(
      [&](double u) { return std::sqrt(u * (1.0 - u)) / d.density_quantile(u); }, lo, hi, 1e-11);
  return abs_normal_mean() * r.value;
}

/// Two-sample p = 1, equal marginals, independent bridges: sqrt(2) times the one-sample mean.
inline double equal_p1_mean(const wcost::DistSpec& d, double lo, double hi) {
  return std::sqrt(2.0) * one_sample_p1_mean(d, lo, hi);
}

/// E int (B^X - B^Y)^2 / h^2 du = 2 int u(1-u)/h^2 du.
inline double w2_mean(const wcost::DistSpec& d, double lo, double hi) {
  const auto r = wcost::quad::integrate(
      [&](double u) {
        const double s = std::sqrt(u * (1.0 - u)) / d.density_quantile(u);
        return s * s;
      },
      lo, hi, 1e-11);
  return 2.0 * r.value;
}

/// W1 between N(0,1) and its quantile-tent perturbation with height 0.3 and
/// slope ratio 2.2 : 20 on the two flanks: the area under the tent.
inline double tent_w1(double width, double height) { return 0.5 * width * height; }

}  // namespace oracle
