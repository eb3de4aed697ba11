#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "frozen_values.hpp"
#include "wcost/error.hpp"
#include "wcost/estimator.hpp"
#include "wcost/rng.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace wcost;

namespace {

PairSpec pair_of(DistSpec x, DistSpec y) {
  return {std::move(x), std::move(y), CouplingSpec::independent(), Partition::whole(Region::D)};
}

}  // namespace

TEST_CASE("empirical estimator on small samples", "[estimator]") {
  const PairedSample s({3.0, 1.0, 2.0}, {0.0, 5.0, 1.0});
  // sorted: (1,0), (2,1), (3,5) -> |1| + |1| + |-2| over 3
  CHECK_THAT(w_cost_empirical(s, power_cost(1.0)), WithinRel(4.0 / 3.0, 1e-15));
  CHECK_THAT(w_cost_empirical(s, power_cost(2.0)), WithinRel(2.0, 1e-15));
  // pinball 0.3: positives weigh 0.3, negatives 0.7
  CHECK_THAT(w_cost_empirical(s, pinball_cost(0.3)), WithinRel((0.3 + 0.3 + 1.4) / 3.0, 1e-15));
  CHECK(w_cost_empirical(PairedSample({1.0, 2.0}, {2.0, 1.0}), power_cost(1.5)) == 0.0);
  CHECK_THROWS_AS(w_cost_empirical(PairedSample(), power_cost(1.0)), ValidationError);
}

TEST_CASE("population values match closed forms", "[estimator]") {
  CHECK_THAT(w_cost_population(pair_of(gaussian(0, 1), gaussian(1, 2)), power_cost(2.0)).value,
             WithinRel(frozen::w2sq_n01_n12, 1e-7));
  CHECK_THAT(w_cost_population(pair_of(exponential(1.0), exponential(2.0)), power_cost(1.5)).value,
             WithinRel(frozen::w15_exp1_exp2, 1e-7));
  CHECK_THAT(w_cost_population(pair_of(gaussian(0, 1), gaussian(1, 1)), pinball_cost(0.3)).value,
             WithinRel(frozen::pinball03_shift, 1e-10));
  CHECK_THAT(w_cost_population(pair_of(gaussian(0, 1), gaussian(0, 2)), asymmetric_power_cost(1, 2, 1.5, 1)).value,
             WithinRel(frozen::asym_n01_n02, 1e-7));
  CHECK_THAT(w_cost_population(pair_of(pareto(3.0, 1.0), pareto(4.0, 1.0)), power_cost(1.0)).value,
             WithinRel(frozen::w1_pareto3_pareto4, 2e-5));
}

TEST_CASE("divergent tails are reported", "[estimator]") {
  // Pareto(1.5) has no second moment, so the squared contrast is infinite.
  CHECK_THROWS_AS(w_cost_population(pair_of(pareto(1.5, 1.0), pareto(4.0, 1.0)), power_cost(2.0)),
                  IntegrabilityError);
}

TEST_CASE("estimator is permutation invariant and homogeneous", "[estimator][property]") {
  Rng r(99);
  std::vector<double> x(500), y(500);
  for (auto& v : x) v = r.normal();
  for (auto& v : y) v = 0.5 + 2.0 * r.normal();
  for (const double p : {1.0, 1.5, 2.0, 3.0}) {
    const CostSpec c = power_cost(p);
    const double base = w_cost_empirical(PairedSample(x, y), c);
    auto xp = x, yp = y;
    std::reverse(xp.begin(), xp.end());
    std::rotate(yp.begin(), yp.begin() + 17, yp.end());
    CHECK(w_cost_empirical(PairedSample(xp, yp), c) == base);
    const double lambda = 2.5;
    auto xs = x, ys = y;
    for (auto& v : xs) v *= lambda;
    for (auto& v : ys) v *= lambda;
    CHECK_THAT(w_cost_empirical(PairedSample(xs, ys), c), WithinRel(std::pow(lambda, p) * base, 1e-12));
    auto xt = x, yt = y;
    for (auto& v : xt) v += 7.0;
    for (auto& v : yt) v += 7.0;
    CHECK_THAT(w_cost_empirical(PairedSample(xt, yt), c), WithinRel(base, 1e-10));
  }
}

TEST_CASE("W1 through the cdf equals the order statistic form", "[estimator]") {
  Rng r(4);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + r.next() % 2000;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = r.normal();
    for (auto& v : y) v = std::floor(4.0 * r.normal()) / 4.0;  // ties
    const PairedSample s(x, y);
    CHECK_THAT(w1_cdf_distance(s), WithinAbs(w_cost_empirical(s, power_cost(1.0)), 1e-12));
  }
}

TEST_CASE("empirical quantile is left continuous", "[estimator]") {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  CHECK(empirical_quantile(s, 0.25) == 1.0);
  CHECK(empirical_quantile(s, 0.26) == 2.0);
  CHECK(empirical_quantile(s, 1.0) == 4.0);
  CHECK(empirical_quantile(s, 1e-9) == 1.0);
}

TEST_CASE("one-sample W_p integrates piecewise", "[estimator]") {
  // One point at 0.5 against U(0,1): int |0.5 - u|^p du = 2 * 0.5^{p+1}/(p+1).
  const std::vector<double> one{0.5};
  for (const double p : {1.0, 1.5, 2.0}) {
    CHECK_THAT(wp_one_sample(one, uniform(0.0, 1.0), p), WithinRel(2.0 * std::pow(0.5, p + 1.0) / (p + 1.0), 1e-9));
  }
  // Two points at 0 and 1: int_0^.5 u du + int_.5^1 (1-u) du = 1/4.
  CHECK_THAT(wp_one_sample(std::vector<double>{0.0, 1.0}, uniform(0.0, 1.0), 1.0), WithinRel(0.25, 1e-9));
}

TEST_CASE("quantile process is centered and scaled", "[estimator]") {
  const PairSpec pair = pair_of(gaussian(0, 1), gaussian(0, 1));
  const PairedSample s = sample_pairs(pair, 400, 3);
  const std::vector<double> grid{0.1, 0.5, 0.9};
  const auto qp = quantile_process(s, pair, grid);
  REQUIRE(qp.size() == 3);
  CHECK_THAT(qp[1].first, WithinAbs(20.0 * empirical_quantile(s.sorted_xs(), 0.5), 1e-12));
}
