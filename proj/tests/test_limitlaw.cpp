#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "frozen_values.hpp"
#include "oracles.hpp"
#include "wcost/error.hpp"
#include "wcost/limitlaw.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace wcost;

namespace {

PairSpec make_pair(DistSpec x, DistSpec y, CouplingSpec c, Partition p) {
  return {std::move(x), std::move(y), std::move(c), std::move(p)};
}

PairSpec equal_pair(const DistSpec& d, CouplingSpec c = CouplingSpec::independent()) {
  return make_pair(d, d, std::move(c), Partition::whole(Region::E));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("regimes follow the partition, support and exponent", "[limitlaw]") {
  const DistSpec g = gaussian(0, 1);
  CHECK(select_regime(equal_pair(g), power_cost(1.5)) == Regime::equal);
  CHECK(select_regime(equal_pair(g), power_cost(2.0)) == Regime::quadratic);
  CHECK(select_regime(equal_pair(beta(2, 2)), power_cost(2.5)) == Regime::compact);
  CHECK(select_regime(make_pair(g, gaussian(1, 1), CouplingSpec::independent(), Partition::whole(Region::D)),
                      power_cost(2.0)) == Regime::distinct);
  const PairSpec mixed = make_pair(g, quantile_tent(g, 0.2, 0.3, 0.5, 0.3), CouplingSpec::independent(),
                                   Partition{{0.0, 0.2, 0.5, 1.0}, {Region::E, Region::D, Region::E}});
  CHECK(select_regime(mixed, power_cost(1.0)) == Regime::mixed);
  CHECK_THROWS_AS(select_regime(equal_pair(g), power_cost(2.5)), ValidationError);
  CHECK(parse_regime(regime_name(Regime::quadratic)) == Regime::quadratic);
  CHECK_THROWS_AS(parse_regime("nonsense"), ValidationError);
}

TEST_CASE("bridge covariance is positive semidefinite with the right diagonal", "[limitlaw][property]") {
  const DistSpec g = gaussian(0, 1);
  const std::vector<double> u{0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  for (const auto& c : {CouplingSpec::independent(), CouplingSpec::comonotone(), CouplingSpec::gaussian(0.5),
                        CouplingSpec::gaussian(-0.7)}) {
    INFO(c.name());
    const Eigen::MatrixXd cov = bridge_covariance(equal_pair(g, c), u);
    REQUIRE(cov.rows() == 14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK_THAT(cov(i, i), WithinAbs(u[i] * (1.0 - u[i]), 1e-15));
      CHECK_THAT(cov(i + 7, i + 7), WithinAbs(u[i] * (1.0 - u[i]), 1e-15));
    }
  }
}

TEST_CASE("bridge grids factor their covariance", "[limitlaw]") {
  const DistSpec g = gaussian(0, 1);
  GridSpec spec;
  spec.m = 255;
  const BridgeGrid ind = build_bridge_grid(equal_pair(g), spec);
  CHECK(ind.layout == FactorLayout::block);
  CHECK(ind.m() == 255);
  CHECK_THAT(ind.u.front(), WithinAbs(1e-4, 1e-18));
  CHECK_THAT(ind.u.back(), WithinAbs(1.0 - 1e-4, 1e-15));
  CHECK(ind.factor_residual < 1e-10);
  CHECK(build_bridge_grid(equal_pair(g, CouplingSpec::comonotone()), spec).layout == FactorLayout::shared);
  const BridgeGrid dense = build_bridge_grid(equal_pair(g, CouplingSpec::gaussian(0.4)), spec);
  CHECK(dense.layout == FactorLayout::dense);
  CHECK(dense.factor_residual < 1e-8);
  spec.spacing = GridSpacing::logit;
  const BridgeGrid lg = build_bridge_grid(equal_pair(g), spec);
  CHECK(lg.u.front() < lg.u[1]);
  CHECK_THAT(std::accumulate(lg.weights.begin(), lg.weights.end(), 0.0), WithinAbs(1.0 - 2e-4, 1e-12));
}

TEST_CASE("sampled bridges have the marginal and cross variances", "[limitlaw][property]") {
  const DistSpec g = gaussian(0, 1);
  GridSpec spec;
  spec.m = 63;
  const BridgeGrid grid = build_bridge_grid(equal_pair(g, CouplingSpec::gaussian(0.6)), spec);
  const std::size_t n = 20000;
  const Eigen::MatrixXd b = draw_bridges(grid, n, 17);
  REQUIRE(b.rows() == 126);
  const Eigen::MatrixXd cov = bridge_covariance(equal_pair(g, CouplingSpec::gaussian(0.6)), grid.u);
  for (const std::size_t k : {0u, 15u, 31u, 50u, 62u}) {
    const double vx = b.row(k).squaredNorm() / n;
    const double vy = b.row(k + 63).squaredNorm() / n;
    const double cxy = b.row(k).dot(b.row(k + 63)) / n;
    const double sd = cov(k, k);
    CHECK_THAT(vx, WithinAbs(sd, 5.0 * sd * std::sqrt(2.0 / n)));
    CHECK_THAT(vy, WithinAbs(sd, 5.0 * sd * std::sqrt(2.0 / n)));
    CHECK_THAT(cxy, WithinAbs(cov(k, k + 63), 5.0 * sd * std::sqrt(2.0 / n)));
  }
  // Bridge covariance across u: min(u,v) - uv.
  const double c = b.row(10).dot(b.row(40)) / n;
  CHECK_THAT(c, WithinAbs(cov(10, 40), 0.02));
}

TEST_CASE("draws are deterministic for any thread count", "[limitlaw]") {
  const DistSpec g = gaussian(0, 1);
  GridSpec spec;
  spec.m = 127;
  const PairSpec pair = equal_pair(g);
  const BridgeGrid grid = build_bridge_grid(pair, spec);
  DrawOptions opt;
  opt.n_sim = 300;
  opt.seed = 9;
  opt.truncation = TruncationPolicy::warn;
  const auto a = draw_limit(pair, power_cost(1.5), grid, opt);
  opt.threads = 3;
  const auto b = draw_limit(pair, power_cost(1.5), grid, opt);
  CHECK(a.values == b.values);
  CHECK(a.regime == Regime::equal);
  opt.seed = 10;
  CHECK(draw_limit(pair, power_cost(1.5), grid, opt).values != a.values);
}

TEST_CASE("comonotone equal marginals give exactly zero draws", "[limitlaw]") {
  const PairSpec pair = equal_pair(gaussian(0, 1), CouplingSpec::comonotone());
  GridSpec spec;
  spec.m = 127;
  DrawOptions opt;
  opt.n_sim = 200;
  opt.truncation = TruncationPolicy::warn;
  const auto d = draw_limit(pair, power_cost(1.5), build_bridge_grid(pair, spec), opt);
  for (const double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("uniform quadratic limit has the closed-form mean", "[limitlaw]") {
  const DistSpec u = uniform(0, 1);
  const PairSpec pair = equal_pair(u);
  GridSpec spec;
  spec.m = 511;
  DrawOptions opt;
  opt.n_sim = 4000;
  opt.seed = 2;
  const auto d = draw_limit(pair, power_cost(2.0), build_bridge_grid(pair, spec), opt);
  CHECK(d.regime == Regime::compact);
  CHECK_THAT(mean_of(d.values), WithinRel(oracle::uniform_w2_mean, 0.03));
}

TEST_CASE("one-sample and equal p = 1 limits match their means", "[limitlaw]") {
  const DistSpec g = gaussian(0, 1);
  GridSpec spec;
  spec.m = 1023;
  spec.delta = 1e-5;
  DrawOptions opt;
  opt.n_sim = 4000;
  opt.seed = 5;
  opt.truncation = TruncationPolicy::warn;
  const PairSpec pair = equal_pair(g);
  const BridgeGrid grid = build_bridge_grid(pair, spec);
  const auto one = draw_limit_one_sample(g, 1.0, grid, opt);
  CHECK_THAT(mean_of(one.values), WithinRel(oracle::one_sample_p1_mean(g, 1e-5, 1.0 - 1e-5), 0.04));
  CHECK_THAT(oracle::one_sample_p1_mean(g, 1e-14, 1.0 - 1e-14),
             WithinRel(oracle::abs_normal_mean() * frozen::gauss_int_sqrt_over_h, 1e-3));
  const auto two = draw_limit(pair, power_cost(1.0), grid, opt);
  CHECK_THAT(mean_of(two.values), WithinRel(oracle::equal_p1_mean(g, 1e-5, 1.0 - 1e-5), 0.04));
  const PairSpec unif = equal_pair(uniform(0, 1));
  const auto ou = draw_limit_one_sample(uniform(0, 1), 1.0, build_bridge_grid(unif, spec), opt);
  CHECK_THAT(mean_of(ou.values), WithinRel(frozen::uniform_one_sample_p1_mean, 0.04));
}

TEST_CASE("heavy truncated mass is an error unless downgraded", "[limitlaw]") {
  const DistSpec w = weibull(1.2, 1.0);
  const PairSpec pair = equal_pair(w);
  GridSpec spec;
  spec.m = 127;
  spec.delta = 0.05;
  DrawOptions opt;
  opt.n_sim = 100;
  const BridgeGrid grid = build_bridge_grid(pair, spec);
  CHECK_THROWS_AS(draw_limit(pair, power_cost(1.5), grid, opt), TruncationError);
  opt.truncation = TruncationPolicy::warn;
  std::string warned;
  const auto prev = set_warning_handler([&](std::string_view m) { warned = m; });
  const auto d = draw_limit(pair, power_cost(1.5), grid, opt);
  set_warning_handler(prev);
  CHECK(d.values.size() == 100);
  CHECK_FALSE(warned.empty());
}

TEST_CASE("distinct-marginal variance matches the closed forms", "[limitlaw]") {
  const PairSpec shift{gaussian(0, 1), gaussian(1, 1), CouplingSpec::independent(), Partition::whole(Region::D)};
  const Sigma2Result sq = sigma2_D(shift, power_cost(2.0));
  CHECK_THAT(sq.quadrature, WithinRel(oracle::sigma2_gauss_shift_squared, 1e-3));
  CHECK_THAT(sq.monte_carlo, WithinRel(oracle::sigma2_gauss_shift_squared, 0.02));
  const Sigma2Result pb = sigma2_D(shift, pinball_cost(0.3));
  CHECK_THAT(pb.quadrature, WithinRel(oracle::sigma2_pinball_shift(0.3), 1e-3));
  // Comonotone coupling of a pure shift: the two bridges cancel.
  PairSpec co = shift;
  co.coupling = CouplingSpec::comonotone();
  CHECK_THAT(sigma2_D(co, power_cost(2.0)).quadrature, WithinAbs(0.0, 1e-9));
}

TEST_CASE("pointwise limit variance", "[limitlaw]") {
  const DistSpec u = uniform(0, 1);
  const PairSpec pair = equal_pair(u);
  CHECK_THAT(limit_variance_at(pair, false, 0.25), WithinRel(2.0 * 0.25 * 0.75, 1e-12));
  const PairSpec co = equal_pair(u, CouplingSpec::comonotone());
  CHECK_THAT(limit_variance_at(co, true, 0.25), WithinAbs(0.0, 1e-15));
}
