#include <catch_amalgamated.hpp>

#include <cmath>

#include "wcost/costs.hpp"
#include "wcost/error.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace wcost;

TEST_CASE("power cost values, slopes and metadata", "[costs]") {
  const CostSpec c = power_cost(1.5);
  CHECK_THAT(evaluate(c, 4.0), WithinRel(8.0, 1e-15));
  CHECK_THAT(evaluate(c, -4.0), WithinRel(8.0, 1e-15));
  CHECK(evaluate(c, 0.0) == 0.0);
  CHECK_THAT(derivative(c, 4.0), WithinRel(3.0, 1e-12));
  CHECK_THAT(derivative(c, -4.0), WithinRel(-3.0, 1e-12));
  CHECK(c.b() == 1.5);
  CHECK(c.pi_minus == 1.0);
  CHECK(c.pi_plus == 1.0);
  CHECK(c.power.has_value());
  CHECK_THROWS_AS(derivative(c, 0.0), DomainError);
  CHECK_THROWS_AS(evaluate(c, NAN), DomainError);
}

TEST_CASE("rate sequence follows the normalizer", "[costs]") {
  CHECK_THAT(rate_vn(power_cost(1.0), 10000), WithinRel(100.0, 1e-12));
  CHECK_THAT(rate_vn(power_cost(1.5), 2000), WithinRel(std::pow(2000.0, 0.75), 1e-12));
  CHECK_THAT(rate_vn(power_cost(2.0), 2000), WithinRel(2000.0, 1e-12));
  // The larger branch dominates near 0.
  CHECK_THAT(rate_vn(asymmetric_power_cost(1.0, 3.0, 1.0, 1.0), 100), WithinRel(10.0 / 3.0, 1e-12));
  CHECK_THROWS_AS(rate_vn(power_cost(1.0), 0), ValidationError);
}

TEST_CASE("asymmetric branches set pi by the smaller exponent", "[costs]") {
  const CostSpec eq = asymmetric_power_cost(0.5, 2.0, 1.2, 1.2);
  CHECK_THAT(eq.pi_minus, WithinRel(0.25, 1e-15));
  CHECK(eq.pi_plus == 1.0);
  const CostSpec ne = asymmetric_power_cost(1.0, 2.0, 1.5, 1.0);
  CHECK(ne.pi_plus == 1.0);
  CHECK(ne.pi_minus == 0.0);
  CHECK(ne.b() == 1.0);
  const CostSpec pb = pinball_cost(0.3);
  CHECK_THAT(evaluate(pb, -2.0), WithinRel(1.4, 1e-15));
  CHECK_THAT(evaluate(pb, 2.0), WithinRel(0.6, 1e-15));
}

TEST_CASE("invalid parameters are rejected", "[costs]") {
  CHECK_THROWS_AS(power_cost(0.5), ValidationError);
  CHECK_THROWS_AS(pinball_cost(1.0), ValidationError);
  CHECK_THROWS_AS(asymmetric_power_cost(-1.0, 1.0, 1.0, 1.0), ValidationError);
  CostSpec concave = power_cost(1.0);
  concave.power.reset();
  concave.rho_plus = [](double x) { return std::sqrt(x); };
  CHECK_THROWS_AS(validate_cost(concave), ValidationError);
  CostSpec decreasing = power_cost(1.0);
  decreasing.rho_minus = [](double x) { return 1.0 / (1.0 + x); };
  CHECK_THROWS_AS(validate_cost(decreasing), ValidationError);
}

TEST_CASE("convexity and derivative properties hold across families", "[costs][property]") {
  for (const CostSpec& c : {power_cost(1.0), power_cost(1.5), power_cost(2.0), power_cost(3.0), pinball_cost(0.2),
                            asymmetric_power_cost(1.0, 2.0, 1.5, 1.0)}) {
    INFO(c.family);
    REQUIRE_NOTHROW(validate_cost(c));
    for (double x = -5.0; x <= 5.0; x += 0.37) {
      const double y = x + 0.61;
      CHECK(evaluate(c, 0.5 * (x + y)) <= 0.5 * (evaluate(c, x) + evaluate(c, y)) + 1e-12);
      if (std::abs(x) > 1e-3) {
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        const double fd = (evaluate(c, x + h) - evaluate(c, x - h)) / (2.0 * h);
        CHECK_THAT(derivative(c, x), WithinAbs(fd, 1e-5 * (1.0 + std::abs(fd))));
      }
    }
  }
}

TEST_CASE("spliced costs probe their metadata", "[costs]") {
  SplicedBranch br;
  br.near = [](double x) { return x * x; };
  br.far = [](double x) { return 2.0 * x - 1.0; };
  br.splice = 1.0;
  br.b = 2.0;
  const CostSpec c = custom_spliced_cost(br, br, 0.5, 2.0);
  CHECK_THAT(c.L0_plus, WithinRel(1.0, 1e-9));
  CHECK_THAT(c.pi_minus, WithinRel(1.0, 1e-12));
  CHECK_THAT(evaluate(c, 3.0), WithinRel(5.0, 1e-15));
  CHECK_FALSE(c.l_prime_verified);

  SplicedBranch gap = br;
  gap.far = [](double x) { return 2.0 * x; };
  CHECK_THROWS_AS(custom_spliced_cost(gap, br, 0.5, 2.0), ValidationError);
}

TEST_CASE("log cost inverts on a log scale", "[costs]") {
  const CostSpec c = asymmetric_power_cost(2.0, 0.5, 1.5, 1.2);
  for (double t : {-3.0, 0.0, 4.0, 40.0}) {
    for (Side s : {Side::minus, Side::plus}) {
      const double y = log_cost_at_log(c, s, t);
      CHECK_THAT(log_cost_inverse(c, s, y), WithinAbs(t, 1e-10 * (1.0 + std::abs(t))));
    }
  }
  CHECK_THAT(slowly_varying(c, Side::minus, 0.3), WithinRel(2.0, 1e-14));
}
