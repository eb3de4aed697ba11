#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wcost/costs.hpp"
#include "wcost/pair.hpp"

namespace wcost {

/// Which limit law governs the statistic.
///   equal      F = G, 1 <= b < 2, rate v_n
///   quadratic  F = G, b = 2, rate n
///   compact    F = G on a bounded support, any b >= 1, rate v_n
///   distinct   F^{-1} != G^{-1} on all of (0,1), Gaussian limit at rate sqrt(n)
///   mixed      E and D both non-empty, rate sqrt(n)
///   one_sample F_n against a fixed F, rate n^{p/2}
enum class Regime { equal, quadratic, compact, distinct, mixed, one_sample };

std::string regime_name(Regime r);
Regime parse_regime(const std::string& name);

/// Picks the regime from the partition, the supports and the cost exponent.
/// Throws ValidationError when no implemented limit law applies.
Regime select_regime(const PairSpec& pair, const CostSpec& cost);

enum class GridSpacing { equispaced, logit };

struct GridSpec {
  std::size_t m = 2047;
  double delta = 1e-4;
  GridSpacing spacing = GridSpacing::equispaced;
};

/// How the joint covariance of (B^X, B^Y) on the grid is factored.
///   shared      comonotone: one m x m factor, B^Y = B^X exactly
///   block       independent: one m x m factor used for both bridges
///   dense       any other copula: a 2m x 2m factor of the joint covariance
enum class FactorLayout { shared, block, dense };

struct BridgeGrid {
  GridSpec spec;
  std::vector<double> u;
  std::vector<double> weights;  ///< trapezoid weights on u
  std::vector<double> inv_hx;   ///< 1 / h_X(u)
  std::vector<double> inv_hy;   ///< 1 / h_Y(u)
  FactorLayout layout = FactorLayout::block;
  Eigen::MatrixXd factor;       ///< lower triangular
  double jitter = 0.0;
  double factor_residual = 0.0; ///< relative Frobenius residual of factor * factor^T

  std::size_t m() const noexcept { return u.size(); }
};

/// Grid u_1 = delta < ... < u_m = 1 - delta and the factor of the bridge
/// covariance (min(u,v) - uv on each diagonal block, C(u,v) - uv across).
/// Jitter escalates 0, 1e-12, 1e-10, 1e-8; failure throws NumericalError.
BridgeGrid build_bridge_grid(const PairSpec& pair, const GridSpec& spec);

/// Covariance of the bridges on the grid, assembled explicitly (for checks).
Eigen::MatrixXd bridge_covariance(const PairSpec& pair, const std::vector<double>& u);

enum class TruncationPolicy { error, warn };

struct DrawOptions {
  std::size_t n_sim = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  TruncationPolicy truncation = TruncationPolicy::error;
};

struct LimitDraws {
  std::vector<double> values;
  Regime regime = Regime::equal;
  GridSpec grid;
  double jitter = 0.0;
  double factor_residual = 0.0;
  std::uint64_t seed = 0;
  double tail_bound = 0.0;  ///< expected magnitude of the functional on (0, delta) and (1 - delta, 1)
  double median_abs = 0.0;
};

LimitDraws draw_limit_E(const PairSpec& pair, const CostSpec& cost, const BridgeGrid& grid, const DrawOptions& opt);
LimitDraws draw_limit_W2(const PairSpec& pair, const BridgeGrid& grid, const DrawOptions& opt);
LimitDraws draw_limit_ED(const PairSpec& pair, const CostSpec& cost, const BridgeGrid& grid, const DrawOptions& opt);
/// Uses only the X bridge of `grid`.
LimitDraws draw_limit_one_sample(const DistSpec& dist, double p, const BridgeGrid& grid, const DrawOptions& opt);

/// Dispatches on the regime of (pair, cost).
LimitDraws draw_limit(const PairSpec& pair, const CostSpec& cost, const BridgeGrid& grid, const DrawOptions& opt);

/// Raw path draws: row k of the result is B^X(u_k) (first m rows) then B^Y(u_k).
/// Exposed for the sampler property checks.
Eigen::MatrixXd draw_bridges(const BridgeGrid& grid, std::size_t n_sim, std::uint64_t seed, unsigned threads = 1);

struct Sigma2Options {
  std::size_t quad_points = 1201;  ///< logit-grid nodes per axis
  double quad_edge = 1e-12;        ///< logit grid spans [edge, 1 - edge]
  std::size_t mc_m = 511;
  double mc_delta = 1e-7;
  std::size_t mc_draws = 100000;
  std::uint64_t seed = 7;
  double tolerance = 0.02;
};

struct Sigma2Result {
  double quadrature = 0.0;
  double monte_carlo = 0.0;
  std::size_t mc_draws = 0;
};

/// sigma^2 = Var int_D rho_c'(tau) B du. Computed by a double quadrature and
/// checked against the sample variance of simulated integrals; disagreement
/// beyond the tolerance throws NumericalError.
Sigma2Result sigma2_D(const PairSpec& pair, const CostSpec& cost, const Sigma2Options& opt = {});

/// Variance of B(u) = B^X/h_X - B^Y/h_Y at u = 1 - q (upper) or u = q (lower).
double limit_variance_at(const PairSpec& pair, bool upper, double q);

}  // namespace wcost
