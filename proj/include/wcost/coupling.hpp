#pragma once

#include <functional>
#include <string>

#include "wcost/rng.hpp"

namespace wcost {

enum class CouplingKind { independent, comonotone, gaussian, custom };

/// A uniform pair drawn from a copula. The complements are carried so that
/// upper quantiles stay accurate when u or v is close to 1.
struct UniformPair {
  double u, u_c;
  double v, v_c;
};

using CopulaFn = std::function<double(double, double)>;

/// Dependence of (X, Y) expressed as a copula C over the marginals.
class CouplingSpec {
 public:
  static CouplingSpec independent();
  static CouplingSpec comonotone();
  static CouplingSpec gaussian(double rho);
  static CouplingSpec custom(CopulaFn copula, std::string name = "custom");

  CouplingKind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }
  std::string name() const;

  /// C(u, v).
  double copula(double u, double v) const;
  UniformPair sample(Rng& rng) const;

 private:
  CouplingKind kind_ = CouplingKind::independent;
  double rho_ = 0.0;
  CopulaFn copula_;
  std::string name_;
};

/// Boundary conditions and 2-increasing property on a grid x grid lattice.
/// Throws ValidationError on the first violation.
void validate_copula(const CouplingSpec& coupling, int grid = 64);

}  // namespace wcost
