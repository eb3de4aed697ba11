#include "wcost/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "wcost/error.hpp"
#include "wcost/special.hpp"

namespace wcost {

CouplingSpec CouplingSpec::independent() { return CouplingSpec{}; }

CouplingSpec CouplingSpec::comonotone() {
  CouplingSpec c;
  c.kind_ = CouplingKind::comonotone;
  return c;
}

CouplingSpec CouplingSpec::gaussian(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ValidationError("gaussian coupling requires rho in (-1, 1)");
  CouplingSpec c;
  c.kind_ = CouplingKind::gaussian;
  c.rho_ = rho;
  return c;
}

CouplingSpec CouplingSpec::custom(CopulaFn copula, std::string name) {
  if (!copula) throw ValidationError("custom coupling requires a copula function");
  CouplingSpec c;
  c.kind_ = CouplingKind::custom;
  c.copula_ = std::move(copula);
  c.name_ = std::move(name);
  return c;
}

std::string CouplingSpec::name() const {
  switch (kind_) {
    case CouplingKind::independent:
      return "independent";
    case CouplingKind::comonotone:
      return "comonotone";
    case CouplingKind::gaussian: {
      std::ostringstream os;
      os << "gaussian(" << rho_ << ")";
      return os.str();
    }
    case CouplingKind::custom:
      return name_;
  }
  return "unknown";
}

double CouplingSpec::copula(double u, double v) const {
  switch (kind_) {
    case CouplingKind::independent:
      return u * v;
    case CouplingKind::comonotone:
      return std::min(u, v);
    case CouplingKind::gaussian:
      if (u <= 0.0 || v <= 0.0) return 0.0;
      if (u >= 1.0) return v;
      if (v >= 1.0) return u;
      return special::bivariate_normal_cdf(special::normal_quantile(u), special::normal_quantile(v), rho_);
    case CouplingKind::custom:
      return copula_(u, v);
  }
  return 0.0;
}

UniformPair CouplingSpec::sample(Rng& rng) const {
  switch (kind_) {
    case CouplingKind::independent: {
      const double u = rng.uniform();
      const double v = rng.uniform();
      return {u, 1.0 - u, v, 1.0 - v};
    }
    case CouplingKind::comonotone: {
      const double u = rng.uniform();
      return {u, 1.0 - u, u, 1.0 - u};
    }
    case CouplingKind::gaussian: {
      const double z1 = rng.normal();
      const double z2 = rho_ * z1 + std::sqrt(1.0 - rho_ * rho_) * rng.normal();
      return {special::normal_cdf(z1), special::normal_cdf(-z1), special::normal_cdf(z2), special::normal_cdf(-z2)};
    }
    case CouplingKind::custom: {
      // Conditional inversion: solve dC/du(u, v) = w for v by bisection.
      const double u = rng.uniform();
      const double w = rng.uniform();
      const double h = std::min({1e-6, 0.5 * u, 0.5 * (1.0 - u)});
      const auto cond = [&](double v) { return (copula_(u + h, v) - copula_(u - h, v)) / (2.0 * h); };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cond(mid) < w) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double v = 0.5 * (lo + hi);
      return {u, 1.0 - u, v, 1.0 - v};
    }
  }
  return {0.5, 0.5, 0.5, 0.5};
}

void validate_copula(const CouplingSpec& coupling, int grid) {
  const auto fail = [&](const std::string& what, double u, double v) {
    std::ostringstream os;
    os << "coupling " << coupling.name() << " is not a copula: " << what << " at (" << u << ", " << v << ")";
    throw ValidationError(os.str());
  };
  constexpr double tol = 1e-10;
  for (int i = 0; i <= grid; ++i) {
    const double u = static_cast<double>(i) / grid;
    if (std::abs(coupling.copula(u, 0.0)) > tol) fail("C(u,0) != 0", u, 0.0);
    if (std::abs(coupling.copula(0.0, u)) > tol) fail("C(0,v) != 0", 0.0, u);
    if (std::abs(coupling.copula(u, 1.0) - u) > tol) fail("C(u,1) != u", u, 1.0);
    if (std::abs(coupling.copula(1.0, u) - u) > tol) fail("C(1,v) != v", 1.0, u);
  }
  std::vector<double> prev(grid + 1), cur(grid + 1);
  for (int j = 0; j <= grid; ++j) prev[j] = coupling.copula(0.0, static_cast<double>(j) / grid);
  for (int i = 1; i <= grid; ++i) {
    const double u = static_cast<double>(i) / grid;
    for (int j = 0; j <= grid; ++j) cur[j] = coupling.copula(u, static_cast<double>(j) / grid);
    for (int j = 1; j <= grid; ++j) {
      const double vol = cur[j] - cur[j - 1] - prev[j] + prev[j - 1];
      if (vol < -tol) fail("negative rectangle volume", u, static_cast<double>(j) / grid);
    }
    std::swap(prev, cur);
  }
}

}  // namespace wcost
