#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wcost/costs.hpp"
#include "wcost/pair.hpp"
#include "wcost/sample.hpp"

namespace wcost {

/// (1/n) sum_i rho_c(X_(i) - Y_(i)) over the order statistics.
double w_cost_empirical(const PairedSample& sample, const CostSpec& cost);
double w_cost_sorted(std::span<const double> sorted_x, std::span<const double> sorted_y, const CostSpec& cost);

struct QuadratureSpec {
  double delta = 1e-8;           ///< interior integral runs over [delta, 1 - delta]
  double rel_tol = 1e-10;        ///< interior adaptive tolerance
  double tail_tolerance = 1e-6;  ///< allowed extrapolated mass beyond the last tail decade
};

struct PopulationValue {
  double value = 0.0;      ///< interior plus both tail estimates
  double interior = 0.0;   ///< integral over [delta, 1 - delta]
  double tail_lower = 0.0; ///< estimated mass on (0, delta)
  double tail_upper = 0.0; ///< estimated mass on (1 - delta, 1)
  double quad_error = 0.0;
  double delta = 0.0;

  double tail_bound() const noexcept { return tail_lower + tail_upper; }
};

/// W_c(F, G) = int_0^1 rho_c(F^{-1}(u) - G^{-1}(u)) du. Throws IntegrabilityError
/// naming the tail when a tail series does not converge.
PopulationValue w_cost_population(const PairSpec& pair, const CostSpec& cost, const QuadratureSpec& quad = {});

/// int |F_n(t) - G_n(t)| dt, integrated exactly between merged breakpoints.
double w1_cdf_distance(const PairedSample& sample);

/// Left-continuous empirical quantile X_(ceil(n u)).
double empirical_quantile(std::span<const double> sorted, double u);

/// (sqrt(n)(F_n^{-1}(u) - F^{-1}(u)), sqrt(n)(G_n^{-1}(u) - G^{-1}(u))) on the grid.
std::vector<std::pair<double, double>> quantile_process(const PairedSample& sample, const PairSpec& pair,
                                                        std::span<const double> grid);

/// W_p^p(F_n, F_0) = int_0^1 |F_n^{-1}(u) - F_0^{-1}(u)|^p du, integrated
/// segment by segment with the kink where F_n^{-1} crosses F_0^{-1} split out.
double wp_one_sample(std::span<const double> sorted_xs, const DistSpec& null, double p);

}  // namespace wcost
