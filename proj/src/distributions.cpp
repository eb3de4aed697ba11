#include "wcost/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/beta.hpp>

#include "wcost/error.hpp"
#include "wcost/special.hpp"

namespace wcost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

/// Increasing root of f(t) = y on t in [lo, +inf) by bracketing then bisection.
template <class F>
double increasing_root(F f, double y, double lo) {
  while (lo > -745.0 && f(lo) > y) lo -= 8.0;
  double hi = lo + 1.0;
  while (hi < 1e300 && !(f(hi) >= y)) {
    lo = hi;
    hi = 2.0 * std::abs(hi) + 1.0;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// x with cdf(x) = u by bracketed bisection on the support, seeded by one Newton step.
template <class Cdf, class Pdf>
double invert_cdf(Cdf cdf, Pdf pdf, double u, Interval s, double guess) {
  double lo = s.lo, hi = s.hi;
  if (!s.bounded_below()) {
    lo = std::min(guess, -1.0);
    while (cdf(lo) > u) lo *= 2.0;
  }
  if (!s.bounded_above()) {
    hi = std::max(guess, 1.0);
    while (cdf(hi) < u) hi *= 2.0;
  }
  double x = std::clamp(guess, lo, hi);
  const double d = pdf(x);
  if (d > 0.0 && std::isfinite(d)) {
    const double nx = x - (cdf(x) - u) / d;
    if (nx > lo && nx < hi) x = nx;
  }
  if (cdf(x) < u) {
    lo = x;
  } else {
    hi = x;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double c = cdf(mid);
    if (c < u) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

class Gaussian final : public DistModel {
 public:
  Gaussian(double mu, double sd) : mu_(mu), sd_(sd) {}
  std::string family() const override { return "gaussian"; }
  std::map<std::string, double> params() const override { return {{"mean", mu_}, {"sd", sd_}}; }
  Interval support() const override { return {}; }
  double cdf(double x) const override { return special::normal_cdf(z(x)); }
  double sf(double x) const override { return special::normal_sf(z(x)); }
  double log_cdf(double x) const override { return special::normal_log_sf(-z(x)); }
  double log_sf(double x) const override { return special::normal_log_sf(z(x)); }
  double density(double x) const override { return special::normal_pdf(z(x)) / sd_; }
  double quantile(double u) const override { return mu_ + sd_ * special::normal_quantile(u); }
  double quantile_upper(double q) const override { return mu_ + sd_ * special::normal_quantile_upper(q); }
  double density_quantile(double u) const override { return special::normal_pdf(special::normal_quantile(u)) / sd_; }
  double density_quantile_upper(double q) const override {
    return special::normal_pdf(special::normal_quantile_upper(q)) / sd_;
  }
  double psi_plus_inverse_log(double y) const override {
    if (y <= std::log(2.0) + 1e-12) return DistModel::psi_plus_inverse_log(y);
    return std::log(mu_ + sd_ * special::normal_log_sf_inverse(y));
  }
  double psi_minus_inverse_log(double y) const override {
    if (y <= std::log(2.0) + 1e-12) return DistModel::psi_minus_inverse_log(y);
    return std::log(-mu_ + sd_ * special::normal_log_sf_inverse(y));
  }

 private:
  double z(double x) const { return (x - mu_) / sd_; }
  double mu_, sd_;
};

class Exponential final : public DistModel {
 public:
  explicit Exponential(double rate) : rate_(rate) {}
  std::string family() const override { return "exponential"; }
  std::map<std::string, double> params() const override { return {{"rate", rate_}}; }
  Interval support() const override { return {0.0, kInf}; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-rate_ * x); }
  double log_sf(double x) const override { return x <= 0.0 ? 0.0 : -rate_ * x; }
  double density(double x) const override { return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x); }
  double quantile(double u) const override { return -std::log1p(-u) / rate_; }
  double quantile_upper(double q) const override { return -std::log(q) / rate_; }
  double density_quantile(double u) const override { return rate_ * (1.0 - u); }
  double density_quantile_upper(double q) const override { return rate_ * q; }
  double psi_plus_at_log(double t) const override { return rate_ * std::exp(t); }
  double psi_plus_inverse_log(double y) const override { return std::log(y / rate_); }

 private:
  double rate_;
};

class Pareto final : public DistModel {
 public:
  Pareto(double index, double scale) : p_(index), xm_(scale) {}
  std::string family() const override { return "pareto"; }
  std::map<std::string, double> params() const override { return {{"index", p_}, {"scale", xm_}}; }
  Interval support() const override { return {xm_, kInf}; }
  double cdf(double x) const override { return x <= xm_ ? 0.0 : -std::expm1(-p_ * std::log(x / xm_)); }
  double sf(double x) const override { return x <= xm_ ? 1.0 : std::pow(x / xm_, -p_); }
  double log_sf(double x) const override { return x <= xm_ ? 0.0 : -p_ * std::log(x / xm_); }
  double density(double x) const override { return x < xm_ ? 0.0 : p_ / xm_ * std::pow(x / xm_, -p_ - 1.0); }
  double quantile(double u) const override { return xm_ * std::exp(-std::log1p(-u) / p_); }
  double quantile_upper(double q) const override { return xm_ * std::pow(q, -1.0 / p_); }
  double density_quantile(double u) const override { return p_ / xm_ * std::exp((1.0 + 1.0 / p_) * std::log1p(-u)); }
  double density_quantile_upper(double q) const override { return p_ / xm_ * std::pow(q, 1.0 + 1.0 / p_); }
  double psi_plus_at_log(double t) const override { return std::max(0.0, p_ * (t - std::log(xm_))); }
  double psi_plus_inverse_log(double y) const override { return std::log(xm_) + y / p_; }

 private:
  double p_, xm_;
};

class Weibull final : public DistModel {
 public:
  Weibull(double w, double scale) : w_(w), lambda_(scale) {}
  std::string family() const override { return "weibull"; }
  std::map<std::string, double> params() const override { return {{"shape", w_}, {"scale", lambda_}}; }
  Interval support() const override { return {0.0, kInf}; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / lambda_, w_)); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / lambda_, w_)); }
  double log_sf(double x) const override { return x <= 0.0 ? 0.0 : -std::pow(x / lambda_, w_); }
  double density(double x) const override {
    if (x <= 0.0) return 0.0;
    const double r = x / lambda_;
    return w_ / lambda_ * std::pow(r, w_ - 1.0) * std::exp(-std::pow(r, w_));
  }
  double quantile(double u) const override { return lambda_ * std::pow(-std::log1p(-u), 1.0 / w_); }
  double quantile_upper(double q) const override { return lambda_ * std::pow(-std::log(q), 1.0 / w_); }
  // h(u) = w (1-u) (log(1/(1-u)))^{1-1/w} / scale.
  double density_quantile(double u) const override {
    return w_ / lambda_ * (1.0 - u) * std::pow(-std::log1p(-u), 1.0 - 1.0 / w_);
  }
  double density_quantile_upper(double q) const override {
    return w_ / lambda_ * q * std::pow(-std::log(q), 1.0 - 1.0 / w_);
  }
  double psi_plus_at_log(double t) const override { return std::exp(w_ * (t - std::log(lambda_))); }
  double psi_plus_inverse_log(double y) const override { return std::log(lambda_) + std::log(y) / w_; }

 private:
  double w_, lambda_;
};

class Beta final : public DistModel {
 public:
  Beta(double a, double b) : a_(a), b_(b), d_(a, b), mirror_(b, a) {}
  std::string family() const override { return "beta"; }
  std::map<std::string, double> params() const override { return {{"a", a_}, {"b", b_}}; }
  Interval support() const override { return {0.0, 1.0}; }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::cdf(d_, x);
  }
  double sf(double x) const override {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return boost::math::cdf(boost::math::complement(d_, x));
  }
  double density(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return boost::math::pdf(d_, x);
  }
  double quantile(double u) const override { return boost::math::quantile(d_, u); }
  double quantile_upper(double q) const override { return boost::math::quantile(boost::math::complement(d_, q)); }
  // 1 - X is Beta(b, a), whose lower tail keeps full precision near x = 1.
  double density_quantile_upper(double q) const override {
    return boost::math::pdf(mirror_, boost::math::quantile(mirror_, q));
  }

 private:
  double a_, b_;
  boost::math::beta_distribution<double> d_, mirror_;
};

class Uniform final : public DistModel {
 public:
  Uniform(double lo, double hi) : lo_(lo), hi_(hi) {}
  std::string family() const override { return "uniform"; }
  std::map<std::string, double> params() const override { return {{"lo", lo_}, {"hi", hi_}}; }
  Interval support() const override { return {lo_, hi_}; }
  double cdf(double x) const override { return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0); }
  double sf(double x) const override { return std::clamp((hi_ - x) / (hi_ - lo_), 0.0, 1.0); }
  double density(double x) const override { return (x < lo_ || x > hi_) ? 0.0 : 1.0 / (hi_ - lo_); }
  double quantile(double u) const override { return lo_ + u * (hi_ - lo_); }
  double quantile_upper(double q) const override { return hi_ - q * (hi_ - lo_); }
  double density_quantile(double) const override { return 1.0 / (hi_ - lo_); }
  double density_quantile_upper(double) const override { return 1.0 / (hi_ - lo_); }

 private:
  double lo_, hi_;
};

class LogTail final : public DistModel {
 public:
  explicit LogTail(double w) : w_(w) {}
  std::string family() const override { return "log_tail"; }
  std::map<std::string, double> params() const override { return {{"w", w_}}; }
  Interval support() const override { return {0.0, 1.0}; }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::exp(-std::pow(-std::log(x), w_));
  }
  double sf(double x) const override {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return -std::expm1(-std::pow(-std::log(x), w_));
  }
  double density(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double lx = -std::log(x);
    return cdf(x) * w_ * std::pow(lx, w_ - 1.0) / x;
  }
  double quantile(double u) const override { return std::exp(-std::pow(-std::log(u), 1.0 / w_)); }
  double quantile_upper(double q) const override { return std::exp(-std::pow(-std::log1p(-q), 1.0 / w_)); }
  double density_quantile(double u) const override { return h_from_log(u, -std::log(u)); }
  double density_quantile_upper(double q) const override { return h_from_log(1.0 - q, -std::log1p(-q)); }

 private:
  // With L = -log u: h(u) = u w L^{1-1/w} exp(L^{1/w}).
  double h_from_log(double u, double l) const {
    return u * w_ * std::pow(l, 1.0 - 1.0 / w_) * std::exp(std::pow(l, 1.0 / w_));
  }
  double w_;
};

class QuantileTent final : public DistModel {
 public:
  QuantileTent(DistSpec base, double lo, double peak, double hi, double height)
      : base_(std::move(base)), lo_(lo), peak_(peak), hi_(hi), c_(height) {}
  std::string family() const override { return "quantile_tent(" + base_.family() + ")"; }
  std::map<std::string, double> params() const override {
    auto p = base_.params();
    p["lo"] = lo_;
    p["peak"] = peak_;
    p["hi"] = hi_;
    p["height"] = c_;
    return p;
  }
  Interval support() const override { return base_.support(); }
  bool smooth() const override { return false; }

  double cdf(double x) const override {
    const double u = base_.cdf(x);
    if (x <= base_.quantile(lo_) || x >= base_.quantile(hi_)) return u;
    double a = lo_, b = hi_;
    for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
      const double mid = 0.5 * (a + b);
      if (quantile(mid) < x) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  }
  double sf(double x) const override {
    if (x >= base_.quantile(hi_)) return base_.sf(x);
    return 1.0 - cdf(x);
  }
  double log_sf(double x) const override { return x >= base_.quantile(hi_) ? base_.model().log_sf(x) : std::log(sf(x)); }
  double log_cdf(double x) const override { return x <= base_.quantile(lo_) ? base_.model().log_cdf(x) : std::log(cdf(x)); }
  double density(double x) const override { return density_quantile(cdf(x)); }
  double quantile(double u) const override { return base_.quantile(u) + tent(u); }
  double quantile_upper(double q) const override { return base_.quantile_upper(q) + tent(1.0 - q); }
  double density_quantile(double u) const override {
    return 1.0 / (1.0 / base_.density_quantile(u) + tent_slope(u));
  }
  double density_quantile_upper(double q) const override {
    return 1.0 / (1.0 / base_.density_quantile_upper(q) + tent_slope(1.0 - q));
  }
  double psi_plus_at_log(double t) const override { return base_.psi_at_log(true, t); }
  double psi_minus_at_log(double t) const override { return base_.psi_at_log(false, t); }
  double psi_plus_inverse_log(double y) const override { return base_.psi_inverse_log(true, y); }
  double psi_minus_inverse_log(double y) const override { return base_.psi_inverse_log(false, y); }

  double tent(double u) const {
    if (u <= lo_ || u >= hi_) return 0.0;
    return u <= peak_ ? c_ * (u - lo_) / (peak_ - lo_) : c_ * (hi_ - u) / (hi_ - peak_);
  }
  double tent_slope(double u) const {
    if (u <= lo_ || u >= hi_) return 0.0;
    return u <= peak_ ? c_ / (peak_ - lo_) : -c_ / (hi_ - peak_);
  }

 private:
  DistSpec base_;
  double lo_, peak_, hi_, c_;
};

class Custom final : public DistModel {
 public:
  explicit Custom(CustomDistFns f) : f_(std::move(f)) {}
  std::string family() const override { return f_.name; }
  std::map<std::string, double> params() const override { return {}; }
  Interval support() const override { return f_.support; }
  bool smooth() const override { return f_.smooth; }
  double cdf(double x) const override { return f_.cdf(x); }
  double density(double x) const override { return f_.density(x); }
  double quantile(double u) const override {
    if (f_.quantile) return f_.quantile(u);
    const Interval s = f_.support;
    const double guess = s.bounded() ? s.lo + u * (s.hi - s.lo) : (s.bounded_below() ? s.lo + 1.0 : 0.0);
    return invert_cdf(f_.cdf, f_.density, u, s, guess);
  }

 private:
  CustomDistFns f_;
};

}  // namespace

double DistModel::log_cdf(double x) const { return std::log(cdf(x)); }
double DistModel::log_sf(double x) const { return std::log(sf(x)); }

double DistModel::psi_plus_at_log(double t) const { return -log_sf(std::exp(t)); }
double DistModel::psi_minus_at_log(double t) const { return -log_cdf(-std::exp(t)); }

double DistModel::psi_plus_inverse_log(double y) const {
  return increasing_root([this](double t) { return psi_plus_at_log(t); }, y, 0.0);
}
double DistModel::psi_minus_inverse_log(double y) const {
  return increasing_root([this](double t) { return psi_minus_at_log(t); }, y, 0.0);
}

double DistSpec::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile requires u in (0,1)");
  return model_->quantile(u);
}
double DistSpec::quantile_upper(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("upper quantile requires q in (0,1)");
  return model_->quantile_upper(q);
}
double DistSpec::density_quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("density quantile requires u in (0,1)");
  return model_->density_quantile(u);
}
double DistSpec::density_quantile_upper(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("density quantile requires q in (0,1)");
  return model_->density_quantile_upper(q);
}

double DistSpec::sample(Rng& rng) const {
  const double u = rng.uniform();
  return quantile_split(u, 1.0 - u);
}

DistSpec gaussian(double mean, double sd) {
  require(std::isfinite(mean) && sd > 0.0 && std::isfinite(sd), "gaussian requires finite mean and sd > 0");
  return DistSpec(std::make_shared<Gaussian>(mean, sd));
}
DistSpec exponential(double rate) {
  require(rate > 0.0 && std::isfinite(rate), "exponential requires rate > 0");
  return DistSpec(std::make_shared<Exponential>(rate));
}
DistSpec pareto(double index, double scale) {
  require(index > 0.0 && std::isfinite(index), "pareto requires index p > 0");
  require(scale > 0.0 && std::isfinite(scale), "pareto requires scale > 0");
  return DistSpec(std::make_shared<Pareto>(index, scale));
}
DistSpec weibull(double shape, double scale) {
  require(shape > 0.0 && std::isfinite(shape), "weibull requires shape w > 0");
  require(scale > 0.0 && std::isfinite(scale), "weibull requires scale > 0");
  return DistSpec(std::make_shared<Weibull>(shape, scale));
}
DistSpec beta(double a, double b) {
  require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), "beta requires a > 0 and b > 0");
  return DistSpec(std::make_shared<Beta>(a, b));
}
DistSpec uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform requires finite lo < hi");
  return DistSpec(std::make_shared<Uniform>(lo, hi));
}
DistSpec log_tail(double w) {
  require(w > 1.0 && std::isfinite(w), "log_tail requires w > 1");
  return DistSpec(std::make_shared<LogTail>(w));
}

DistSpec quantile_tent(const DistSpec& base, double lo, double peak, double hi, double height) {
  require(base.valid(), "quantile_tent requires a base distribution");
  require(0.0 < lo && lo < peak && peak < hi && hi < 1.0, "quantile_tent requires 0 < lo < peak < hi < 1");
  require(height > 0.0 && std::isfinite(height), "quantile_tent requires height > 0");
  // Descending side must not make the quantile decrease: 1/h(u) > slope on (peak, hi).
  const double slope = height / (hi - peak);
  for (int i = 0; i <= 200; ++i) {
    const double u = peak + (hi - peak) * i / 200.0;
    if (!(1.0 / base.density_quantile(u) > slope)) {
      std::ostringstream os;
      os << "quantile_tent: descending slope " << slope << " makes the quantile non-increasing near u = " << u;
      throw ValidationError(os.str());
    }
  }
  return DistSpec(std::make_shared<QuantileTent>(base, lo, peak, hi, height));
}

DistSpec custom_distribution(CustomDistFns fns) {
  require(static_cast<bool>(fns.cdf) && static_cast<bool>(fns.density), "custom distribution needs cdf and density");
  require(fns.support.lo < fns.support.hi, "custom distribution needs a non-empty support");
  return DistSpec(std::make_shared<Custom>(std::move(fns)));
}

void validate_distribution(const DistSpec& dist, int probes) {
  const auto fail = [&](const std::string& what, double u) {
    std::ostringstream os;
    os << dist.family() << ": " << what << " at u = " << u;
    throw ValidationError(os.str());
  };
  for (int i = 1; i <= probes; ++i) {
    const double u = static_cast<double>(i) / (probes + 1);
    const double x = dist.quantile(u);
    const double back = dist.quantile(dist.cdf(x));
    if (std::abs(back - x) > 1e-8 * std::max(1.0, std::abs(x))) fail("quantile(cdf(x)) != x", u);
    const double h = dist.density_quantile(u);
    const double f = dist.density(x);
    if (std::abs(h - f) > 1e-10 * std::max(std::abs(f), 1e-300) + 1e-300) fail("density_quantile != density o quantile", u);
    if (u > 0.5 && dist.tail_unbounded(true)) {
      const double psi = dist.psi_plus(x);
      const double ref = -std::log1p(-dist.cdf(x));
      if (std::abs(psi - ref) > 1e-8 * std::max(1.0, std::abs(ref))) fail("psi_plus != -log(1 - cdf)", u);
    }
  }
}

}  // namespace wcost
