#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace cavspdc::stats {

/// Standard normal CDF.
double normal_cdf(double z);

/// Probability mass of N(mean, sigma^2) inside [lo, hi). sigma == 0
/// degenerates to the indicator of mean being inside the interval.
double gaussian_mass(double lo, double hi, double mean, double sigma);

/// Regularized lower/upper incomplete gamma functions P(a,x), Q(a,x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-squared distribution with `dof` degrees of
/// freedom: P(X > x).
double chi2_sf(double x, double dof);

/// log(k!) accurate to better than 1e-12, safe for concurrent use.
double log_factorial(std::uint64_t k);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

}  // namespace cavspdc::stats
