#include "wcost/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wcost/error.hpp"

namespace wcost {
namespace {

constexpr double kFdStep = 1e-6;

double central_difference(const ScalarFn& f, double x) {
  const double h = kFdStep * std::abs(x);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

ScalarFn power_branch(double a, double b) {
  if (b == 1.0) return [a](double x) { return a * x; };
  if (b == 2.0) return [a](double x) { return a * x * x; };
  return [a, b](double x) { return a * std::pow(x, b); };
}

ScalarFn power_slope(double a, double b) {
  if (b == 1.0) return [a](double) { return a; };
  return [a, b](double x) { return a * b * std::pow(x, b - 1.0); };
}

void fill_pi_from_power(CostSpec& c, double a_minus, double a_plus) {
  if (c.b_minus == c.b_plus) {
    const double top = std::max(a_minus, a_plus);
    c.pi_minus = a_minus / top;
    c.pi_plus = a_plus / top;
  } else {
    c.pi_minus = c.b_minus < c.b_plus ? 1.0 : 0.0;
    c.pi_plus = c.b_plus < c.b_minus ? 1.0 : 0.0;
  }
}

[[noreturn]] void fail_condition(const std::string& label, const std::string& what) {
  throw ValidationError("cost violates " + label + ": " + what);
}

}  // namespace

double evaluate(const CostSpec& cost, double x) {
  if (!std::isfinite(x)) throw DomainError("cost evaluated at a non-finite point");
  if (x > 0.0) return cost.rho_plus(x);
  if (x < 0.0) return cost.rho_minus(-x);
  return 0.0;
}

double derivative(const CostSpec& cost, double x) {
  if (!std::isfinite(x)) throw DomainError("cost derivative at a non-finite point");
  if (x == 0.0) throw DomainError("cost derivative requested at the kink x = 0");
  if (x > 0.0) return cost.slope_plus ? cost.slope_plus(x) : central_difference(cost.rho_plus, x);
  const double a = -x;
  return -(cost.slope_minus ? cost.slope_minus(a) : central_difference(cost.rho_minus, a));
}

double normalizer(const CostSpec& cost, double x) { return std::max(cost.rho_plus(x), cost.rho_minus(x)); }

double rate_vn(const CostSpec& cost, std::int64_t n) {
  if (n < 1) throw ValidationError("rate_vn requires n >= 1");
  const double x = 1.0 / std::sqrt(static_cast<double>(n));
  if (x >= cost.x0) {
    std::ostringstream os;
    os << "rate_vn: 1/sqrt(n) = " << x << " is not below x0 = " << cost.x0 << "; asymptotic regime not reached";
    warn(os.str());
  }
  return 1.0 / normalizer(cost, x);
}

double slowly_varying(const CostSpec& cost, Side side, double x) {
  return cost.branch(side)(x) / std::pow(x, cost.b_of(side));
}

double log_cost_at_log(const CostSpec& cost, Side side, double t) {
  const ScalarFn& l = side == Side::minus ? cost.log_rho_minus_at_log : cost.log_rho_plus_at_log;
  if (l) return l(t);
  return std::log(cost.branch(side)(std::exp(t)));
}

double log_cost_inverse(const CostSpec& cost, Side side, double y) {
  if (cost.power) {
    const double a = side == Side::minus ? cost.power->coef_minus : cost.power->coef_plus;
    return (y - std::log(a)) / cost.b_of(side);
  }
  double lo = std::log(cost.y0);
  if (log_cost_at_log(cost, side, lo) > y) {
    while (lo > -700.0 && log_cost_at_log(cost, side, lo) > y) lo -= 1.0;
  }
  double hi = lo + 1.0;
  while (hi < 1e6 && !(log_cost_at_log(cost, side, hi) >= y)) hi = 2.0 * hi + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_cost_at_log(cost, side, mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CostSpec asymmetric_power_cost(double a_minus, double a_plus, double b_minus, double b_plus) {
  if (!(a_minus > 0.0 && a_plus > 0.0) || !std::isfinite(a_minus) || !std::isfinite(a_plus)) {
    fail_condition("(C2)", "coefficients a_minus, a_plus must be positive and finite");
  }
  if (!(b_minus >= 1.0 && b_plus >= 1.0) || !std::isfinite(b_minus) || !std::isfinite(b_plus)) {
    fail_condition("(C2)", "exponents b_minus, b_plus must be finite and >= 1");
  }
  CostSpec c;
  c.family = "asymmetric_power";
  c.rho_minus = power_branch(a_minus, b_minus);
  c.rho_plus = power_branch(a_plus, b_plus);
  c.slope_minus = power_slope(a_minus, b_minus);
  c.slope_plus = power_slope(a_plus, b_plus);
  c.b_minus = b_minus;
  c.b_plus = b_plus;
  c.L0_minus = a_minus;
  c.L0_plus = a_plus;
  c.gamma_minus = 0.0;
  c.gamma_plus = 0.0;
  fill_pi_from_power(c, a_minus, a_plus);
  c.log_rho_minus_at_log = [a_minus, b_minus](double t) { return std::log(a_minus) + b_minus * t; };
  c.log_rho_plus_at_log = [a_plus, b_plus](double t) { return std::log(a_plus) + b_plus * t; };
  c.power = kernels::PowerCost{a_minus, a_plus, b_minus, b_plus};
  return c;
}

CostSpec power_cost(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail_condition("(C2)", "power cost requires p >= 1");
  CostSpec c = asymmetric_power_cost(1.0, 1.0, p, p);
  c.family = "power";
  return c;
}

CostSpec pinball_cost(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail_condition("(C2)", "pinball cost requires 0 < alpha < 1");
  CostSpec c = asymmetric_power_cost(1.0 - alpha, alpha, 1.0, 1.0);
  c.family = "pinball";
  return c;
}

CostSpec custom_spliced_cost(const SplicedBranch& minus, const SplicedBranch& plus, double x0, double y0) {
  if (!(x0 > 0.0 && y0 > x0)) throw ValidationError("custom cost requires 0 < x0 < y0");
  const auto make = [](const SplicedBranch& s, const char* name) -> ScalarFn {
    if (!s.near || !s.far) throw ValidationError(std::string("custom cost: missing ") + name + " branch");
    if (!(s.splice > 0.0)) throw ValidationError(std::string("custom cost: splice point of ") + name + " must be positive");
    const double a = s.near(s.splice), b = s.far(s.splice);
    if (std::abs(a - b) > 1e-8 * std::max(std::abs(a), std::numeric_limits<double>::min())) {
      std::ostringstream os;
      os << "custom cost: " << name << " branch is discontinuous at splice " << s.splice << " (" << a << " vs " << b
         << ")";
      throw ValidationError(os.str());
    }
    return [near = s.near, far = s.far, x_s = s.splice](double x) { return x <= x_s ? near(x) : far(x); };
  };
  CostSpec c;
  c.family = "custom_spliced";
  c.rho_minus = make(minus, "minus");
  c.rho_plus = make(plus, "plus");
  c.b_minus = minus.b;
  c.b_plus = plus.b;
  c.gamma_minus = minus.gamma;
  c.gamma_plus = plus.gamma;
  c.x0 = x0;
  c.y0 = y0;
  c.l_prime_verified = false;

  const auto log_branch = [](const SplicedBranch& s) -> ScalarFn {
    if (!s.log_far_at_log) return {};
    return [near = s.near, lfar = s.log_far_at_log, x_s = s.splice](double t) {
      return std::exp(t) <= x_s ? std::log(near(std::exp(t))) : lfar(t);
    };
  };
  c.log_rho_minus_at_log = log_branch(minus);
  c.log_rho_plus_at_log = log_branch(plus);

  // L(0) is read off at the smallest probe; (Lpi) is checked in validate_cost.
  const double probe = 1e-8 * x0;
  c.L0_minus = slowly_varying(c, Side::minus, probe);
  c.L0_plus = slowly_varying(c, Side::plus, probe);
  const double p4 = 1e-4 * x0;
  const double top = normalizer(c, p4);
  c.pi_minus = c.rho_minus(p4) / top;
  c.pi_plus = c.rho_plus(p4) / top;
  validate_cost(c);
  return c;
}

void validate_cost(const CostSpec& cost) {
  if (!cost.rho_minus || !cost.rho_plus) throw ValidationError("cost is missing a branch");
  if (!(cost.b_minus >= 1.0 && cost.b_plus >= 1.0)) fail_condition("(C2)", "b_minus and b_plus must be >= 1");
  if (!(cost.gamma_minus >= 0.0 && cost.gamma_plus >= 0.0)) fail_condition("(C3)", "gamma indices must be >= 0");
  if (!(cost.pi_minus >= 0.0 && cost.pi_minus <= 1.0 && cost.pi_plus >= 0.0 && cost.pi_plus <= 1.0)) {
    fail_condition("(C4)", "pi_minus and pi_plus must lie in [0,1]");
  }

  for (const Side side : {Side::minus, Side::plus}) {
    const ScalarFn& r = cost.branch(side);
    const char* name = side == Side::minus ? "minus" : "plus";
    double prev = 0.0;
    for (int k = 0; k <= 90; ++k) {
      const double x = std::pow(10.0, -6.0 + k / 10.0);
      const double v = r(x);
      if (!(v > 0.0)) fail_condition("(C2)", std::string(name) + " branch is not positive at some x > 0");
      if (v < prev) fail_condition("(C0)", std::string(name) + " branch is decreasing");
      prev = v;
      const double y = 1.3 * x;
      const double ry = r(y);
      const double mid = r(0.5 * (x + y));
      if (mid > 0.5 * (v + ry) + 1e-12 * (1.0 + v + ry)) {
        fail_condition("(C0)", std::string(name) + " branch fails midpoint convexity");
      }
    }
    if (cost.b_of(side) == 1.0) {
      const double l6 = slowly_varying(cost, side, 1e-6 * cost.x0);
      const double l8 = slowly_varying(cost, side, 1e-8 * cost.x0);
      if (!std::isfinite(l8) || std::abs(l6 - l8) > 1e-3 * std::max(std::abs(l8), 1e-300)) {
        fail_condition("(Lpi)", std::string(name) + " branch has b = 1 but L does not converge at 0");
      }
    }
  }

  // Built-in families carry exact pi; only user costs are probed.
  if (cost.power) return;
  const double probe = 1e-4 * cost.x0;
  const double top = normalizer(cost, probe);
  const double pm = cost.rho_minus(probe) / top, pp = cost.rho_plus(probe) / top;
  if (std::abs(pm - cost.pi_minus) > 1e-2 || std::abs(pp - cost.pi_plus) > 1e-2) {
    std::ostringstream os;
    os << "declared pi = (" << cost.pi_minus << ", " << cost.pi_plus << ") but probe at x = " << probe << " gives ("
       << pm << ", " << pp << ")";
    fail_condition("(C4)", os.str());
  }
  if (cost.b_minus == cost.b_plus && std::abs(std::max(cost.pi_minus, cost.pi_plus) - 1.0) > 1e-2) {
    fail_condition("(C4)", "max(pi_minus, pi_plus) must equal 1 when b_minus = b_plus");
  }
}

}  // namespace wcost
