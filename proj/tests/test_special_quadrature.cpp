#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "frozen_values.hpp"
#include "wcost/error.hpp"
#include "wcost/quadrature.hpp"
#include "wcost/rng.hpp"
#include "wcost/special.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace wcost;

TEST_CASE("normal tail functions stay accurate far out", "[special]") {
  CHECK_THAT(special::normal_log_sf(40.0), WithinRel(frozen::normal_log_sf_40, 1e-12));
  CHECK_THAT(special::normal_log_sf(5.0), WithinRel(frozen::normal_log_sf_5, 1e-12));
  CHECK_THAT(special::normal_quantile(1e-300), WithinRel(frozen::normal_quantile_1e_300, 1e-12));
  CHECK_THAT(special::normal_quantile_upper(1e-300), WithinRel(-frozen::normal_quantile_1e_300, 1e-12));
  CHECK_THAT(special::normal_cdf(0.0), WithinAbs(0.5, 1e-16));
}

TEST_CASE("normal quantile inverts the cdf", "[special]") {
  for (double u : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK_THAT(special::normal_cdf(special::normal_quantile(u)), WithinRel(u, 1e-12));
  }
  for (double y : {1.0, 10.0, 100.0, 1e4}) {
    CHECK_THAT(-special::normal_log_sf(special::normal_log_sf_inverse(y)), WithinRel(y, 1e-10));
  }
}

TEST_CASE("bivariate normal cdf matches references", "[special]") {
  CHECK_THAT(special::bivariate_normal_cdf(0.0, 0.0, 0.5), WithinAbs(frozen::bvn_0_0_r05, 1e-12));
  CHECK_THAT(special::bivariate_normal_cdf(1.0, -0.5, 0.7), WithinAbs(frozen::bvn_1_m05_r07, 1e-10));
  CHECK_THAT(special::bivariate_normal_cdf(-2.0, -2.0, -0.9), WithinAbs(frozen::bvn_m2_m2_rm09, 1e-15));
  CHECK_THAT(special::bivariate_normal_cdf(3.0, 2.0, 0.99), WithinAbs(frozen::bvn_3_2_r099, 1e-10));
  // Independence and comonotone limits.
  CHECK_THAT(special::bivariate_normal_cdf(0.3, -0.4, 0.0),
             WithinAbs(special::normal_cdf(0.3) * special::normal_cdf(-0.4), 1e-14));
}

TEST_CASE("absolute normal moments", "[special]") {
  CHECK_THAT(special::abs_normal_moment(1.0), WithinRel(std::sqrt(2.0 / std::numbers::pi), 1e-14));
  CHECK_THAT(special::abs_normal_moment(2.0), WithinRel(1.0, 1e-14));
  CHECK_THAT(special::abs_normal_moment(1.5), WithinRel(frozen::abs_moment_15, 1e-12));
}

TEST_CASE("adaptive integration handles endpoint singularities", "[quadrature]") {
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 30);
  CHECK_THAT(r.value, WithinRel(2.0, 1e-5));
  const auto l = quad::integrate([](double x) { return std::log(x); }, 0.0, 1.0, 1e-10, 30);
  CHECK_THAT(l.value, WithinRel(-1.0, 1e-8));
  const auto s = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK_THAT(s.value, WithinRel(2.0, 1e-12));
}

TEST_CASE("trapezoid weights integrate linear functions exactly", "[quadrature]") {
  const std::vector<double> g{0.0, 0.1, 0.35, 0.6, 1.0};
  const auto w = quad::trapezoid_weights(g);
  double total = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    total += w[i];
    lin += w[i] * (3.0 * g[i] + 1.0);
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-15));
  CHECK_THAT(lin, WithinAbs(2.5, 1e-14));
}

TEST_CASE("tail series classifies convergence", "[quadrature]") {
  const auto geo = quad::tail_series([](double q) { return std::pow(q, -0.5); }, 1e-2);
  CHECK(geo.converges);
  CHECK_THAT(geo.total(), WithinRel(0.2, 1e-6));

  // 1/(q log^2(1/q)) integrates to 1/log(1/q_start): slow power decay.
  const auto slow = quad::tail_series([](double q) { return 1.0 / (q * std::pow(std::log(1.0 / q), 2.5)); }, 1e-2);
  CHECK(slow.converges);
  CHECK(slow.mode == "power");

  const auto div = quad::tail_series([](double q) { return 1.0 / q; }, 1e-2);
  CHECK_FALSE(div.converges);
  CHECK(div.mode == "divergent");
}

TEST_CASE("derived seeds are distinct and reproducible", "[rng]") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  double s = 0.0, ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(ss / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u > 0.0 && u < 1.0));
  }
}
