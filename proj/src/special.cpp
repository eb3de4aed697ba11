#include "wcost/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "wcost/error.hpp"

namespace wcost::special {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Asymptotic Mills-ratio series, used where erfc underflows.
double log_sf_asymptotic(double x) {
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
                        105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - std::log(x * std::sqrt(kTwoPi)) + std::log(series);
}

// Gauss-Legendre half rules (6, 12 and 20 points).
constexpr std::array<double, 3> kX6 = {-0.93246951420315205, -0.66120938646626448, -0.23861918608319693};
constexpr std::array<double, 3> kW6 = {0.17132449237916975, 0.36076157304813894, 0.46791393457269137};
constexpr std::array<double, 6> kX12 = {-0.98156063424671924, -0.9041172563704748,  -0.76990267419430469,
                                        -0.58731795428661748, -0.36783149899818018, -0.12523340851146891};
constexpr std::array<double, 6> kW12 = {0.047175336386512022, 0.10693932599531888, 0.16007832854334611,
                                        0.20316742672306565,  0.23349253653835464, 0.24914704581340269};
constexpr std::array<double, 10> kX20 = {-0.99312859918509488, -0.96397192727791381, -0.91223442825132584,
                                         -0.83911697182221878, -0.7463319064601508,  -0.63605368072651502,
                                         -0.51086700195082713, -0.37370608871541955, -0.2277858511416451,
                                         -0.076526521133497338};
constexpr std::array<double, 10> kW20 = {0.017614007139153273, 0.040601429800386217, 0.062672048334109443,
                                         0.083276741576704671, 0.10193011981724026,  0.11819453196151825,
                                         0.13168863844917653,  0.14209610931838187,  0.14917298647260366,
                                         0.15275338713072578};

// Upper orthant probability P(X > dh, Y > dk), Genz's BVND algorithm.
double bivariate_upper(double dh, double dk, double r) {
  const double* x;
  const double* w;
  std::size_t lg;
  if (std::abs(r) < 0.3) {
    x = kX6.data(), w = kW6.data(), lg = kX6.size();
  } else if (std::abs(r) < 0.75) {
    x = kX12.data(), w = kW12.data(), lg = kX12.size();
  } else {
    x = kX20.data(), w = kW20.data(), lg = kX20.size();
  }

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < lg; ++i) {
      for (const double sgn : {1.0, -1.0}) {
        const double sn = std::sin(asr * (sgn * x[i] + 1.0) / 2.0);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return bvn * asr / (2.0 * kTwoPi) + normal_cdf(-h) * normal_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < lg; ++i) {
      for (const double sgn : {1.0, -1.0}) {
        const double xs = std::pow(a * (sgn * x[i] + 1.0), 2);
        const double rs = std::sqrt(1.0 - xs);
        const double asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          bvn += a * w[i] * std::exp(asr) *
                 (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) return bvn + normal_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) {
    if (h < 0.0) {
      bvn += normal_cdf(k) - normal_cdf(h);
    } else {
      bvn += normal_cdf(-h) - normal_cdf(-k);
    }
  }
  return bvn;
}

}  // namespace

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi); }

double normal_cdf(double x) noexcept { return 0.5 * boost::math::erfc(-x * kInvSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * boost::math::erfc(x * kInvSqrt2); }

double normal_log_sf(double x) noexcept {
  if (x < 30.0) return std::log(normal_sf(x));
  return log_sf_asymptotic(x);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("normal quantile requires u in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double normal_quantile_upper(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("normal upper quantile requires q in (0,1)");
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_log_sf_inverse(double y) {
  if (!(y > std::numbers::ln2)) throw DomainError("normal tail exponent inverse requires y > log 2");
  if (y < 600.0) return normal_quantile_upper(std::exp(-y));
  // Newton on -log sf(x) = y; the derivative is the hazard rate.
  double x = std::sqrt(2.0 * y);
  for (int it = 0; it < 50; ++it) {
    const double log_sf = normal_log_sf(x);
    const double hazard = std::exp(-0.5 * x * x - 0.5 * std::log(kTwoPi) - log_sf);
    const double step = (y + log_sf) / hazard;
    x += step;
    if (std::abs(step) <= 1e-15 * x) break;
  }
  return x;
}

double bivariate_normal_cdf(double h, double k, double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw DomainError("bivariate normal correlation must lie in [-1,1]");
  if (h == -INFINITY || k == -INFINITY) return 0.0;
  if (h == INFINITY) return normal_cdf(k);
  if (k == INFINITY) return normal_cdf(h);
  return std::clamp(bivariate_upper(-h, -k, r), 0.0, 1.0);
}

double abs_normal_moment(double b) {
  return std::pow(2.0, b / 2.0) * boost::math::tgamma((b + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

}  // namespace wcost::special
