#pragma once

namespace nomiclaw::stats {

/// P(Z <= z) for standard normal Z, via the complementary error function.
double normal_cdf(double z);

/// Upper tail P(Z > z).
double normal_sf(double z);

/// Two-sided normal p-value for an observed z statistic.
double normal_two_sided_p(double z);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a+1, continued fraction otherwise;
/// relative error below 1e-12 over the tested domain (see unit tests),
/// comfortably inside the 1e-10 contract.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with df degrees of freedom:
/// Q(df/2, x/2).
double chi_square_sf(double x, double df);

}  // namespace nomiclaw::stats
