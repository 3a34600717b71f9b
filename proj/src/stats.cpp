#include "cavspdc/stats.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "cavspdc/error.hpp"

namespace cavspdc::stats {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-15;

// Lower incomplete gamma by series expansion, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double gaussian_mass(double lo, double hi, double mean, double sigma) {
  if (hi <= lo) return 0.0;
  if (sigma <= 0.0) return (mean >= lo && mean < hi) ? 1.0 : 0.0;
  return normal_cdf((hi - mean) / sigma) - normal_cdf((lo - mean) / sigma);
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw Error(ErrorCode::InvalidArgument, "regularized_gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw Error(ErrorCode::InvalidArgument, "regularized_gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chi2_sf(double x, double dof) {
  if (!(dof > 0.0))
    throw Error(ErrorCode::InvalidArgument, "chi2_sf: dof must be > 0");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double log_factorial(std::uint64_t k) {
  constexpr std::size_t kTableSize = 1024;
  static const std::array<double, kTableSize> table = [] {
    std::array<double, kTableSize> t{};
    for (std::size_t i = 0; i < kTableSize; ++i)
      t[i] = std::lgamma(static_cast<double>(i) + 1.0);
    return t;
  }();
  if (k < kTableSize) return table[k];
  // Stirling with two correction terms; below 1e-15 relative error here.
  const double n = static_cast<double>(k);
  return (n + 0.5) * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi) +
         1.0 / (12.0 * n) - 1.0 / (360.0 * n * n * n);
}

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::InvalidArgument,
                "linear_regression: need two equally sized samples of length >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw Error(ErrorCode::InvalidArgument, "linear_regression: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace cavspdc::stats
