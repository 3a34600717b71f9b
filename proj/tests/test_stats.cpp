#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cavspdc/error.hpp"
#include "cavspdc/stats.hpp"

using namespace cavspdc;
using doctest::Approx;

TEST_CASE("normal cdf") {
  CHECK(stats::normal_cdf(0.0) == Approx(0.5).epsilon(1e-15));
  CHECK(stats::normal_cdf(1.96) == Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(stats::normal_cdf(-1.96) == Approx(0.024997895148220428).epsilon(1e-12));
  // value used in the spillover oracle: Phi(413 / 210.19642)
  CHECK(stats::normal_cdf(413.0 / 210.19642153762874) ==
        Approx(0.9752829769322571).epsilon(1e-12));
}

TEST_CASE("gaussian mass") {
  CHECK(stats::gaussian_mass(-1.0, 1.0, 0.0, 1.0) ==
        Approx(0.6826894921370859).epsilon(1e-12));
  CHECK(stats::gaussian_mass(-1e9, 1e9, 3.0, 2.0) == Approx(1.0).epsilon(1e-12));
  CHECK(stats::gaussian_mass(1.0, 2.0, 0.0, 0.0) == 0.0);
  CHECK(stats::gaussian_mass(-1.0, 2.0, 0.0, 0.0) == 1.0);
  CHECK(stats::gaussian_mass(0.0, 2.0, 0.0, 0.0) == 1.0);  // half-open [lo, hi)
  CHECK(stats::gaussian_mass(-2.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(stats::gaussian_mass(2.0, 1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("chi-squared survival function matches reference values") {
  // frozen from an independent implementation
  CHECK(stats::chi2_sf(20.0, 41) == Approx(0.9976448919365318).epsilon(1e-10));
  CHECK(stats::chi2_sf(41.0, 41) == Approx(0.4706223768189809).epsilon(1e-10));
  CHECK(stats::chi2_sf(60.0, 41) == Approx(0.027940952432154113).epsilon(1e-10));
  CHECK(stats::chi2_sf(74.74, 41) == Approx(0.0010012417089476963).epsilon(1e-9));
  CHECK(stats::chi2_sf(3.841458820694124, 1) == Approx(0.05).epsilon(1e-10));
  CHECK(stats::chi2_sf(18.307038053275146, 10) == Approx(0.05).epsilon(1e-10));
  CHECK(stats::chi2_sf(0.1, 2) == Approx(0.951229424500714).epsilon(1e-12));
  CHECK(stats::chi2_sf(0.0, 7) == 1.0);
  CHECK_THROWS_AS(stats::chi2_sf(1.0, 0.0), Error);
}

TEST_CASE("incomplete gamma complementarity") {
  for (double a : {0.5, 1.0, 3.7, 20.5})
    for (double x : {0.1, 1.0, 5.0, 42.0})
      CHECK(stats::regularized_gamma_p(a, x) + stats::regularized_gamma_q(a, x) ==
            Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log factorial") {
  CHECK(stats::log_factorial(0) == 0.0);
  CHECK(stats::log_factorial(1) == 0.0);
  CHECK(stats::log_factorial(5) == Approx(std::log(120.0)).epsilon(1e-14));
  CHECK(stats::log_factorial(100) == Approx(363.73937555556349).epsilon(1e-12));
  // table/Stirling seam
  CHECK(stats::log_factorial(1024) ==
        Approx(std::lgamma(1025.0)).epsilon(1e-13));
  CHECK(stats::log_factorial(2000) == Approx(std::lgamma(2001.0)).epsilon(1e-13));
}

TEST_CASE("linear regression") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0, 9.0};
  const auto fit = stats::linear_regression(x, y);
  CHECK(fit.slope == Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(stats::linear_regression(std::vector<double>{1.0}, std::vector<double>{2.0}),
                  Error);
}
