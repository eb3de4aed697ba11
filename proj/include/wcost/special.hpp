#pragma once

// Normal-law helpers shared by the distribution, coupling and limit modules.

namespace wcost::special {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate far into the right tail.
double normal_sf(double x) noexcept;
/// log(1 - Phi(x)); finite for every finite x.
double normal_log_sf(double x) noexcept;
double normal_quantile(double u);
/// x with 1 - Phi(x) = q, accurate for tiny q.
double normal_quantile_upper(double q);
/// x > 0 with -log(1 - Phi(x)) = y, for any y > log 2 (no underflow).
double normal_log_sf_inverse(double y);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation r.
double bivariate_normal_cdf(double h, double k, double r);

/// E|Z|^b for standard normal Z.
double abs_normal_moment(double b);

}  // namespace wcost::special
