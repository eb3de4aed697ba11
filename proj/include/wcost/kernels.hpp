#pragma once

// Hot loops of the estimator and the limit simulators. Each routine has a
// scalar reference implementation and, where the target allows it, an AVX2 or
// NEON variant picked at runtime. Variants agree with the reference to a few
// ulps per term; they differ only in summation order.

#include <optional>
#include <span>
#include <string_view>

namespace wcost::kernels {

/// rho(d) = coef_minus * |d|^exp_minus for d < 0, coef_plus * d^exp_plus for d > 0.
struct PowerCost {
  double coef_minus = 1.0;
  double coef_plus = 1.0;
  double exp_minus = 1.0;
  double exp_plus = 1.0;
};

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;
/// The variant used by the dispatching entry points below.
Isa active_isa() noexcept;
/// Pins the dispatch to one variant (tests use this); nullopt restores detection.
void force_isa(std::optional<Isa> isa);

/// Sum over i of rho(x[i] - y[i]).
double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c);
/// Sum over i of w[i] * rho(v[i]).
double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c);
/// Sum over i of a[i] * b[i].
double dot(std::span<const double> a, std::span<const double> b);
/// out[i] = bx[i] * sx[i] - by[i] * sy[i].
void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out);

namespace scalar {
double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c);
double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c);
double dot(std::span<const double> a, std::span<const double> b);
void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out);
}  // namespace scalar

#if defined(WCOST_HAVE_AVX2)
namespace avx2 {
double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c);
double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c);
double dot(std::span<const double> a, std::span<const double> b);
void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out);
}  // namespace avx2
#endif

#if defined(WCOST_HAVE_NEON)
namespace neon {
double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c);
double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c);
double dot(std::span<const double> a, std::span<const double> b);
void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out);
}  // namespace neon
#endif

}  // namespace wcost::kernels
