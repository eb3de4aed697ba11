#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "wcost/kernels.hpp"

namespace wcost {

enum class Side { minus, plus };

using ScalarFn = std::function<double(double)>;

/// A convex contrast rho_c(x) = rho_minus(-x) for x < 0 and rho_plus(x) for x > 0,
/// together with the regular-variation metadata the limit laws use.
struct CostSpec {
  std::string family;  ///< "power", "asymmetric_power", "pinball" or "custom_spliced"

  ScalarFn rho_minus;
  ScalarFn rho_plus;
  ScalarFn slope_minus;  ///< d rho_minus / dx on (0, inf); empty means finite differences
  ScalarFn slope_plus;

  double b_minus = 1.0;
  double b_plus = 1.0;
  double L0_minus = 1.0;  ///< lim L_minus(x) as x -> 0; NaN when unknown
  double L0_plus = 1.0;
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;
  double pi_minus = 1.0;
  double pi_plus = 1.0;
  double x0 = 1.0;
  double y0 = 1.0;

  /// l = log rho on a log abscissa, t -> log rho(e^t). Empty means computed
  /// from the branch, which overflows for fast-growing costs.
  ScalarFn log_rho_minus_at_log;
  ScalarFn log_rho_plus_at_log;

  /// Set when the branches are a_pm |x|^b_pm everywhere, enabling the vector kernels.
  std::optional<kernels::PowerCost> power;

  /// Whether the slowly varying part of l at infinity is known to obey the
  /// derivative restriction the limit laws need. Built-ins satisfy it by construction.
  bool l_prime_verified = true;

  double b() const noexcept { return b_minus < b_plus ? b_minus : b_plus; }
  const ScalarFn& branch(Side s) const noexcept { return s == Side::minus ? rho_minus : rho_plus; }
  double b_of(Side s) const noexcept { return s == Side::minus ? b_minus : b_plus; }
  double L0_of(Side s) const noexcept { return s == Side::minus ? L0_minus : L0_plus; }
  double gamma_of(Side s) const noexcept { return s == Side::minus ? gamma_minus : gamma_plus; }
  double pi_of(Side s) const noexcept { return s == Side::minus ? pi_minus : pi_plus; }
};

double evaluate(const CostSpec& cost, double x);
double derivative(const CostSpec& cost, double x);
/// rho = max(rho_plus, rho_minus) near 0.
double normalizer(const CostSpec& cost, double x);
/// v_n = 1 / rho(1 / sqrt(n)).
double rate_vn(const CostSpec& cost, std::int64_t n);
/// L_side(x) = rho_side(x) / x^b_side.
double slowly_varying(const CostSpec& cost, Side side, double x);
/// l_side(e^t) = log rho_side(e^t).
double log_cost_at_log(const CostSpec& cost, Side side, double t);
/// t with l_side(e^t) = y, found by bisection unless the family is a power.
double log_cost_inverse(const CostSpec& cost, Side side, double y);

CostSpec power_cost(double p);
CostSpec asymmetric_power_cost(double a_minus, double a_plus, double b_minus, double b_plus);
CostSpec pinball_cost(double alpha);

/// One side of a spliced cost: `near` on (0, splice], `far` beyond.
struct SplicedBranch {
  ScalarFn near;
  ScalarFn far;
  double splice = 1.0;
  double b = 1.0;
  double gamma = 0.0;
  ScalarFn log_far_at_log;  ///< optional t -> log far(e^t)
};

/// A user cost built from near-0 and near-infinity pieces. Metadata for L0 and
/// pi is probed numerically; continuity at each splice is checked to 1e-8 relative.
CostSpec custom_spliced_cost(const SplicedBranch& minus, const SplicedBranch& plus, double x0, double y0);

/// Structural checks: positivity, monotonicity and midpoint convexity on a
/// grid, b range, (C4) consistency of pi and the (Lpi) limit when b = 1.
/// Throws ValidationError naming the violated condition.
void validate_cost(const CostSpec& cost);

}  // namespace wcost
