#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "wcost/rng.hpp"

namespace wcost {

struct Interval {
  double lo = -INFINITY;
  double hi = INFINITY;

  bool bounded_below() const noexcept { return lo > -INFINITY; }
  bool bounded_above() const noexcept { return hi < INFINITY; }
  bool bounded() const noexcept { return bounded_below() && bounded_above(); }
};

/// Behaviour of one distribution family. Upper-tail entry points take
/// q = 1 - u so that extreme right quantiles keep full precision.
class DistModel {
 public:
  virtual ~DistModel() = default;

  virtual std::string family() const = 0;
  virtual std::map<std::string, double> params() const = 0;
  virtual Interval support() const = 0;
  /// Declared C^2 smoothness with positive density (checked only for built-ins).
  virtual bool smooth() const { return true; }

  virtual double cdf(double x) const = 0;
  virtual double sf(double x) const { return 1.0 - cdf(x); }
  virtual double log_cdf(double x) const;
  virtual double log_sf(double x) const;
  virtual double density(double x) const = 0;

  virtual double quantile(double u) const = 0;
  virtual double quantile_upper(double q) const { return quantile(1.0 - q); }
  virtual double density_quantile(double u) const { return density(quantile(u)); }
  virtual double density_quantile_upper(double q) const { return density(quantile_upper(q)); }

  /// psi_plus(e^t) = -log P(X > e^t) and psi_minus(e^t) = -log P(X < -e^t).
  virtual double psi_plus_at_log(double t) const;
  virtual double psi_minus_at_log(double t) const;
  /// log of the x > 0 solving psi(x) = y (bisection in log x by default).
  virtual double psi_plus_inverse_log(double y) const;
  virtual double psi_minus_inverse_log(double y) const;
};

/// Immutable, cheaply copyable handle on a distribution.
class DistSpec {
 public:
  DistSpec() = default;
  explicit DistSpec(std::shared_ptr<const DistModel> model) : model_(std::move(model)) {}

  bool valid() const noexcept { return static_cast<bool>(model_); }
  const DistModel& model() const { return *model_; }

  std::string family() const { return model_->family(); }
  std::map<std::string, double> params() const { return model_->params(); }
  Interval support() const { return model_->support(); }
  bool smooth() const { return model_->smooth(); }

  double cdf(double x) const { return model_->cdf(x); }
  double sf(double x) const { return model_->sf(x); }
  double density(double x) const { return model_->density(x); }
  double quantile(double u) const;
  double quantile_upper(double q) const;
  double density_quantile(double u) const;
  double density_quantile_upper(double q) const;

  double psi_plus(double x) const { return -model_->log_sf(x); }
  double psi_minus(double x) const { return -model_->log_cdf(-x); }
  double psi_at_log(bool upper, double t) const {
    return upper ? model_->psi_plus_at_log(t) : model_->psi_minus_at_log(t);
  }
  double psi_inverse_log(bool upper, double y) const {
    return upper ? model_->psi_plus_inverse_log(y) : model_->psi_minus_inverse_log(y);
  }
  /// Whether the given tail extends to infinity (otherwise tail conditions are vacuous).
  bool tail_unbounded(bool upper) const { return upper ? !support().bounded_above() : !support().bounded_below(); }

  /// Quantile of a uniform given as the pair (u, 1 - u), using whichever is accurate.
  double quantile_split(double u, double u_complement) const {
    return u <= 0.5 ? quantile(u) : quantile_upper(u_complement);
  }
  double sample(Rng& rng) const;

 private:
  std::shared_ptr<const DistModel> model_;
};

DistSpec gaussian(double mean, double sd);
DistSpec exponential(double rate);
DistSpec pareto(double index, double scale);
DistSpec weibull(double shape, double scale);
DistSpec beta(double a, double b);
DistSpec uniform(double lo, double hi);
/// F(x) = exp(-(-log x)^w) on (0, 1), w > 1: a compactly supported law whose
/// density vanishes faster than any power at 0.
DistSpec log_tail(double w);
/// G^{-1} = F^{-1} + a tent on (lo, hi) peaking at `peak` with the given height.
/// Requires the result to stay strictly increasing.
DistSpec quantile_tent(const DistSpec& base, double lo, double peak, double hi, double height);

/// User-supplied distribution. cdf, density and support are required; the
/// quantile is found by bisection when absent.
struct CustomDistFns {
  std::string name = "custom";
  std::function<double(double)> cdf;
  std::function<double(double)> density;
  std::function<double(double)> quantile;
  Interval support;
  bool smooth = false;
};
DistSpec custom_distribution(CustomDistFns fns);

/// Numerical invariants of a distribution: quantile round trip, h = f o F^{-1},
/// psi consistency. Throws ValidationError describing the first violation.
void validate_distribution(const DistSpec& dist, int probes = 1000);

}  // namespace wcost
