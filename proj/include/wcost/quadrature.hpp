#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wcost::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15 point) integral of f over [a, b]. Endpoints are
/// never evaluated, so integrable endpoint singularities are tolerated.
Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                 unsigned max_depth = 15);

/// Composite trapezoid weights on an arbitrary increasing grid.
std::vector<double> trapezoid_weights(std::span<const double> grid);

/// Decade-by-decade study of an endpoint integral int_0^{q_start} g(q) dq,
/// where q is the distance to the endpoint. Increments are integrated on
/// [10^-(k+1), 10^-k] down to q_min, then classified:
///   geometric  the last increments shrink by a ratio below 0.9 each decade;
///   power      increments fit c * L^-s with L = log(1/q); converges iff s > 1.05;
///   divergent  otherwise.
struct TailSeries {
  std::vector<double> q;           ///< upper end of each decade
  std::vector<double> increments;  ///< integral over that decade
  std::string mode;                ///< "geometric", "power", "divergent" or "vanishing"
  double decay_exponent = 0.0;     ///< fitted s for power mode
  double partial_sum = 0.0;        ///< sum of all computed increments
  double remainder = 0.0;          ///< extrapolated mass below q_min (inf if divergent)
  bool converges = false;

  double total() const { return partial_sum + remainder; }
};

TailSeries tail_series(const std::function<double(double)>& g, double q_start, double q_min = 1e-300);

}  // namespace wcost::quad
