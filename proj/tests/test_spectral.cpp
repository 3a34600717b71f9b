#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavspdc/error.hpp"
#include "cavspdc/spectral.hpp"

using namespace cavspdc;
using doctest::Approx;

TEST_CASE("line fwhm") {
  CHECK(spectral::line_fwhm_mhz(1.21, 55.0) == 22.0);  // exact quotient
  CHECK(spectral::line_fwhm_mhz(2.42, 2.0) == Approx(1210.0));
  CHECK(spectral::line_fwhm_mhz(1.0, 100.0) == Approx(10.0));
  CHECK(spectral::line_fwhm_mhz(1.21, 110.0) == Approx(11.0));
  CHECK_THROWS_AS(spectral::line_fwhm_mhz(1.21, 1.0), Error);
  CHECK_THROWS_AS(spectral::line_fwhm_mhz(0.0, 55.0), Error);
}

TEST_CASE("envelope weight calibration") {
  // FWHM convention: the weight drops to one half at +- bandwidth/2
  CHECK(spectral::envelope_weight(140.0, 280.0, spectral::Envelope::Sinc2) ==
        Approx(0.5).epsilon(1e-9));
  CHECK(spectral::envelope_weight(140.0, 280.0, spectral::Envelope::Gaussian) ==
        Approx(0.5).epsilon(1e-12));
  CHECK(spectral::envelope_weight(0.0, 280.0, spectral::Envelope::Sinc2) == 1.0);
  // first-null convention: the weight vanishes at +- bandwidth
  CHECK(spectral::envelope_weight(280.0, 280.0, spectral::Envelope::Sinc2,
                                  spectral::BandwidthConvention::FirstNull) ==
        Approx(0.0).epsilon(1e-25));
}

TEST_CASE("central fraction for the paper cavity") {
  const double fraction =
      spectral::central_fraction(1.21, 280.0, spectral::Envelope::Sinc2);
  // independently computed: 1/261.21 with the FWHM-calibrated envelope
  CHECK(fraction == Approx(0.0038283230681016955).epsilon(1e-6));
  CHECK(1.0 / fraction == Approx(261.21).epsilon(1e-4));
  // inside the paper's "about 1/250" acceptance band
  CHECK(fraction >= 1.0 / 290.0);
  CHECK(fraction <= 1.0 / 200.0);

  // the alternative first-null reading gives pm_bandwidth/fsr lines
  const double first_null = spectral::central_fraction(
      1.21, 280.0, spectral::Envelope::Sinc2, spectral::BandwidthConvention::FirstNull);
  CHECK(1.0 / first_null == Approx(280.0 / 1.21).epsilon(1e-4));
}

TEST_CASE("central fraction in the few-line regime") {
  // fsr = bandwidth/2: three lines dominate
  const double three_lines =
      spectral::central_fraction(140.0, 280.0, spectral::Envelope::Sinc2);
  CHECK(three_lines == Approx(0.4429464706894523).epsilon(1e-6));
  CHECK(three_lines > 0.3);

  // fsr -> bandwidth: the nearest sidelines hold the rest
  const double wide = spectral::central_fraction(279.0, 280.0, spectral::Envelope::Sinc2);
  CHECK(wide > 1.0 / 3.0);
}

TEST_CASE("central fraction domain and monotonicity") {
  CHECK_THROWS_AS(spectral::central_fraction(280.0, 280.0, spectral::Envelope::Sinc2),
                  Error);
  CHECK_THROWS_AS(spectral::central_fraction(300.0, 280.0, spectral::Envelope::Sinc2),
                  Error);

  for (auto envelope : {spectral::Envelope::Sinc2, spectral::Envelope::Gaussian}) {
    double previous = 1.0;
    for (double bandwidth : {5.0, 20.0, 80.0, 280.0, 1000.0}) {
      const double fraction = spectral::central_fraction(1.21, bandwidth, envelope);
      CHECK(fraction > 0.0);
      CHECK(fraction < 1.0);
      CHECK(fraction < previous);  // strictly decreasing in bandwidth/fsr
      previous = fraction;
    }
  }
}

TEST_CASE("brightness") {
  CHECK(spectral::brightness(4000.0, 1.0 / 250.0, 22.0) ==
        Approx(0.7272727272727273).epsilon(1e-12));
  const double fraction = spectral::central_fraction(1.21, 280.0, spectral::Envelope::Sinc2);
  const double value = spectral::brightness(4000.0, fraction, 22.0);
  CHECK(value == Approx(0.696).epsilon(1e-3));
  CHECK(value >= 0.6);
  CHECK(value <= 0.8);

  // the paper's single-pass comparison point: 300 pairs/s/mW over 280 GHz
  CHECK(spectral::brightness(300.0, 1.0, 280000.0) == Approx(0.0010714285714285715));

  CHECK(spectral::brightness(0.0, 0.5, 22.0) == 0.0);
  CHECK_THROWS_AS(spectral::brightness(-1.0, 0.5, 22.0), Error);
  CHECK_THROWS_AS(spectral::brightness(1.0, 0.0, 22.0), Error);
  CHECK_THROWS_AS(spectral::brightness(1.0, 0.5, 0.0), Error);

  // linear in rate, inverse in line width
  const double base = spectral::brightness(1000.0, 0.004, 22.0);
  CHECK(spectral::brightness(3000.0, 0.004, 22.0) == Approx(3.0 * base).epsilon(1e-12));
  CHECK(spectral::brightness(1000.0, 0.004, 44.0) == Approx(0.5 * base).epsilon(1e-12));
}

TEST_CASE("profile normalization and symmetry") {
  const auto profile = spectral::make_profile(1.21, 55.0, 280.0);
  CHECK(profile.line_fwhm_mhz == 22.0);
  CHECK(profile.weight(0) == 1.0);
  CHECK(profile.weight(3) == profile.weight(-3));
  for (std::size_t k = 1; k < profile.line_weights.size(); ++k)
    CHECK(profile.line_weights[k] <= 1.0);

  // sum * central_fraction == w(0) by construction
  const double fraction =
      spectral::central_fraction(1.21, 280.0, spectral::Envelope::Sinc2);
  const double total = 1.0 / fraction;
  CHECK(total * fraction == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian envelope fraction") {
  // sum over a Gaussian comb approaches bandwidth-driven values smoothly
  const double fraction =
      spectral::central_fraction(1.21, 280.0, spectral::Envelope::Gaussian);
  CHECK(fraction > 0.0);
  CHECK(fraction < 1.0 / 200.0);
}
