#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavspdc/error.hpp"
#include "cavspdc/estimator.hpp"
#include "cavspdc/model.hpp"
#include "cavspdc/rate.hpp"

using namespace cavspdc;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig reference_config() {
  ExperimentConfig config;  // defaults are the reference values
  return config;
}

}  // namespace

TEST_CASE("jitter kernel combines two detectors") {
  const auto kernel = rate::JitterKernel::from_detector_fwhm(350.0);
  CHECK(kernel.sigma_ps == Approx(350.0 / 2.35482 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(kernel.sigma_ps == Approx(210.19642153762874).epsilon(1e-12));
  CHECK(rate::JitterKernel::from_detector_fwhm(0.0).sigma_ps == 0.0);
  CHECK_THROWS_AS(rate::JitterKernel::from_detector_fwhm(-1.0), Error);
}

TEST_CASE("peak train structure") {
  auto config = reference_config();
  const auto train = rate::build_peak_train(config, 41);
  CHECK(train.entries.size() == 83);  // the reference 41-peak analysis window
  CHECK(train.m_max() == 41);
  CHECK(train.at(0).center_ps == 0.0);
  CHECK(train.at(3).center_ps == Approx(3 * 826.0));
  CHECK(train.at(-3).center_ps == Approx(-3 * 826.0));
  CHECK(train.box_width_ps == Approx(3.5));

  const auto tiny = rate::build_peak_train(config, 1);
  const double w0 = std::norm(tiny.at(0).amplitude);
  CHECK(std::norm(tiny.at(1).amplitude) / w0 == Approx(0.89).epsilon(1e-12));
  CHECK(std::norm(tiny.at(-1).amplitude) / w0 == Approx(0.89).epsilon(1e-12));

  const auto single = rate::build_peak_train(config, 0);
  CHECK(single.entries.size() == 1);
  CHECK(single.at(0).center_ps == 0.0);

  // truncation bound: discarded weight <= s^(m_max+1)/(1-s) of the total
  const double s = config.cavity.survival();
  for (int m_max : {5, 10, 41}) {
    const double discarded = 2.0 * std::pow(s, m_max + 1) / (1.0 + s);
    CHECK(discarded <= std::pow(s, m_max + 1) / (1.0 - s));
  }
}

TEST_CASE("expected histogram basics") {
  auto config = reference_config();
  const double duration = 960.0;

  SUBCASE("phi = 0 in the pm45 basis is pure background") {
    auto hist = rate::expected_histogram(config, MeasurementConfig::pm45(), duration);
    const double bg = config.detector.background_rate_hz_per_bin_pm45 * duration;
    for (double c : hist.counts) CHECK(c == Approx(bg).epsilon(1e-12));

    config.detector.background_rate_hz_per_bin_pm45 = 0.0;
    auto dark = rate::expected_histogram(config, MeasurementConfig::pm45(), duration);
    for (double c : dark.counts) CHECK(c == 0.0);
  }

  SUBCASE("phi = pi keeps only odd peaks in pm45") {
    config.cavity.birefringence_phase_rad = kPi;
    config.detector.background_rate_hz_per_bin_pm45 = 0.0;
    auto hist = rate::expected_histogram(config, MeasurementConfig::pm45(), duration);
    const auto sums = est::integrate_peaks(hist, 826.0, 826.0, 10);
    const double s = config.cavity.survival();
    double odd_reference = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i)
      if (std::abs(sums.m[i]) == 1) odd_reference = sums.sum[i];
    REQUIRE(odd_reference > 0.0);
    for (std::size_t i = 0; i < sums.size(); ++i) {
      const int m = std::abs(sums.m[i]);
      if (m % 2 == 0) {
        // jitter spillover from the odd neighbors only
        CHECK(sums.sum[i] < 0.06 * odd_reference);
      } else {
        CHECK(sums.sum[i] / odd_reference ==
              Approx(std::pow(s, m - 1)).epsilon(0.01));
      }
    }
  }

  SUBCASE("H-V window sums decay by s per roundtrip") {
    config.detector.background_rate_hz_per_bin_hv = 0.0;
    // bins that tile the integration windows exactly, so the sums equal the
    // continuous-window oracle
    config.detector.bin_width_ps = 826.0 / 21.0;
    auto hist = rate::expected_histogram(config, MeasurementConfig::hv(), duration);
    const auto sums = est::integrate_peaks(hist, 826.0, 826.0, 12);
    const auto at = [&](int m) {
      for (std::size_t i = 0; i < sums.size(); ++i)
        if (sums.m[i] == m) return sums.sum[i];
      return 0.0;
    };
    // exact geometric ratio away from the |m| kink at zero
    for (int m = 1; m <= 10; ++m)
      CHECK(at(m + 1) / at(m) == Approx(0.89).epsilon(1e-6));
    // the m = 0 -> 1 step carries the asymmetric spillover correction
    CHECK(at(1) / at(0) == Approx(0.8951667646034844).epsilon(1e-6));
    CHECK(at(-1) / at(0) == Approx(0.8951667646034844).epsilon(1e-6));
  }

  SUBCASE("38.3 ps reference binning keeps the decay within the quantization wobble") {
    // 38.3 ps does not divide the roundtrip time; window edges land inside
    // bins and the captured Gaussian mass wobbles by a couple of percent
    config.detector.background_rate_hz_per_bin_hv = 0.0;
    auto hist = rate::expected_histogram(config, MeasurementConfig::hv(), duration);
    const auto sums = est::integrate_peaks(hist, 826.0, 826.0, 12);
    const auto at = [&](int m) {
      for (std::size_t i = 0; i < sums.size(); ++i)
        if (sums.m[i] == m) return sums.sum[i];
      return 0.0;
    };
    for (int m = 0; m <= 10; ++m)
      CHECK(at(m + 1) / at(m) == Approx(0.89).epsilon(0.03));
  }

  SUBCASE("total counts follow rate x duration x basis fraction") {
    config.run.m_span = 30;
    config.detector.background_rate_hz_per_bin_hv = 0.0;
    auto hist = rate::expected_histogram(config, MeasurementConfig::hv(), duration);
    const double expected_total =
        config.detector.pair_detection_rate_hz * duration * 0.25;
    const double truncation =
        2.0 * std::pow(0.89, 30) / 1.89;  // weight beyond the histogram span
    CHECK(hist.total() == Approx(expected_total).epsilon(truncation * 2.0));
  }

  SUBCASE("H-V histogram is symmetric about tau = 0") {
    config.detector.background_rate_hz_per_bin_hv = 0.0;
    auto hist = rate::expected_histogram(config, MeasurementConfig::hv(), duration);
    const int n = hist.n_bins();
    for (int i = 0; i < n / 2; ++i)
      CHECK(hist.counts[i] == Approx(hist.counts[n - 1 - i]).epsilon(1e-9));
  }
}

TEST_CASE("jitter convolution conserves area") {
  auto config = reference_config();
  config.run.m_span = 30;
  config.detector.background_rate_hz_per_bin_hv = 0.01;
  const double duration = 960.0;

  for (double fwhm : {0.0, 350.0, 800.0}) {
    config.detector.jitter_fwhm_ps = fwhm;
    // build with a fixed train so the jitter width is the only variable
    const auto kernel = rate::JitterKernel::from_detector_fwhm(fwhm);
    const auto geometry = make_geometry(826.0, 38.3, config.run.m_span);
    const auto train = rate::build_peak_train(config, 24);
    const auto model = OutcomeModel::from_config(config, MeasurementConfig::hv());
    auto hist = rate::expected_histogram(train, MeasurementConfig::hv(), kernel,
                                         config.detector, duration, geometry, model);
    const double background_total =
        config.detector.background_rate_hz_per_bin_hv * duration * hist.n_bins();
    // signal mass of the truncated train under the infinite-train norm
    const double s = config.cavity.survival();
    double train_mass = 0.0;
    for (const auto& peak : train.entries) train_mass += std::pow(s, std::abs(peak.m));
    const double signal = config.detector.pair_detection_rate_hz * duration * 0.25 *
                          train_mass / ((1.0 + s) / (1.0 - s));
    CHECK(hist.total() - background_total == Approx(signal).epsilon(1e-9));
  }
}

TEST_CASE("box convolution differs from the point-mass shape only slightly") {
  auto config = reference_config();
  config.detector.background_rate_hz_per_bin_hv = 0.0;
  rate::ExpectationOptions point;
  rate::ExpectationOptions box;
  box.shape = rate::PeakShape::BoxConvolved;
  auto a = rate::expected_histogram(config, MeasurementConfig::hv(), 960.0, point);
  auto b = rate::expected_histogram(config, MeasurementConfig::hv(), 960.0, box);
  CHECK(a.total() == Approx(b.total()).epsilon(1e-9));
  double max_rel = 0.0;
  for (int i = 0; i < a.n_bins(); ++i) {
    if (a.counts[i] < 1.0) continue;
    max_rel = std::max(max_rel, std::abs(a.counts[i] - b.counts[i]) / a.counts[i]);
  }
  CHECK(max_rel < 5e-4);  // O((tau_0/sigma)^2)
}

TEST_CASE("expected ratio curve") {
  auto config = reference_config();

  SUBCASE("sigma -> 0 recovers the bare ratio law") {
    config.cavity.birefringence_phase_rad = 0.74;
    const auto curve = rate::expected_ratio_curve(config, rate::JitterKernel{0.0}, 20);
    REQUIRE(curve.entries.size() == 41);
    for (const auto& e : curve.entries)
      CHECK(e.ratio == Approx(model::ratio_law(e.m, 0.74)).epsilon(1e-9).scale(1.0));
  }

  SUBCASE("phi = pi with zero jitter") {
    config.cavity.birefringence_phase_rad = kPi;
    const auto curve = rate::expected_ratio_curve(config, rate::JitterKernel{0.0}, 2);
    CHECK(curve.entries[2].ratio == Approx(0.0).epsilon(1e-20));  // m = 0
    CHECK(curve.entries[3].ratio == Approx(1.0).epsilon(1e-12));  // m = 1
  }

  SUBCASE("phi = 0 gives zero everywhere") {
    const auto curve =
        rate::expected_ratio_curve(config, rate::JitterKernel{210.2}, 20);
    for (const auto& e : curve.entries) CHECK(e.ratio == 0.0);
  }

  SUBCASE("reference jitter floor at phi = pi") {
    config.cavity.birefringence_phase_rad = kPi;
    const auto kernel = rate::JitterKernel::from_detector_fwhm(350.0);
    const auto curve = rate::expected_ratio_curve(config, kernel, 3);
    const auto at = [&](int m) {
      for (const auto& e : curve.entries)
        if (e.m == m) return e.ratio;
      return -1.0;
    };
    // independently computed spillover oracle
    CHECK(at(0) == Approx(0.0442368464255925).epsilon(1e-9));
    CHECK(at(1) == Approx(0.9502466363433736).epsilon(1e-9));
    CHECK(at(2) == Approx(0.04975336363209441).epsilon(1e-9));
    CHECK(at(0) < 0.05);  // well under the ~0.2 floor of the reference measurement
  }

  SUBCASE("ratios stay within [0, 1]") {
    for (double phi : {0.3, 0.74, 1.6, kPi}) {
      config.cavity.birefringence_phase_rad = phi;
      const auto curve =
          rate::expected_ratio_curve(config, rate::JitterKernel{210.2}, 20);
      for (const auto& e : curve.entries) {
        CHECK(e.ratio >= 0.0);
        CHECK(e.ratio <= 1.0);
      }
    }
  }
}

TEST_CASE("backward pump mixture") {
  CHECK(rate::backward_pump_ratio(0.05, 0.1556, EccOrientation::Normal) ==
        Approx(0.12).epsilon(2e-3));
  CHECK(rate::backward_pump_ratio(0.05, 0.1556, EccOrientation::Rotated) ==
        Approx(0.43).epsilon(2e-3));
  CHECK(rate::backward_pump_ratio(0.0, 0.0, EccOrientation::Normal) == 0.0);
  CHECK_THROWS_AS(rate::backward_pump_ratio(-0.1, 0.2, EccOrientation::Normal), Error);
  CHECK_THROWS_AS(rate::backward_pump_ratio(0.1, 1.2, EccOrientation::Normal), Error);

  // result stays in [0, 1/2] whenever the interfering ratio does
  for (double r = 0.0; r <= 0.5; r += 0.05)
    for (double beta = 0.0; beta <= 1.0; beta += 0.1) {
      CHECK(rate::backward_pump_ratio(r, beta, EccOrientation::Normal) <= 0.5 + 1e-15);
      CHECK(rate::backward_pump_ratio(r, beta, EccOrientation::Rotated) <= 0.5 + 1e-15);
    }
}

TEST_CASE("basis weights never exceed the H-V weight") {
  auto config = reference_config();
  for (double phi : {0.0, 0.74, 2.0, kPi}) {
    config.cavity.birefringence_phase_rad = phi;
    const auto hv = OutcomeModel::from_config(config, MeasurementConfig::hv());
    const auto pm = OutcomeModel::from_config(config, MeasurementConfig::pm45());
    for (int m = -25; m <= 25; ++m)
      CHECK(pm.detection_weight(m) <= hv.detection_weight(m) + 1e-15);
  }
}

TEST_CASE("outcome model matches the two-analyzer formula") {
  auto config = reference_config();
  config.cavity.birefringence_phase_rad = 1.1;
  for (double hwp : {0.0, kPi / 8, 0.21}) {
    const auto meas = MeasurementConfig::custom(hwp, 0.0);
    const auto model = OutcomeModel::from_config(config, meas);
    const double a = meas.analyzer_angle_rad();
    for (int m = -9; m <= 9; ++m)
      CHECK(model.interfering_probability(m) ==
            Approx(model::coincidence_probability(m, 1.1, a, a + kPi / 2)).epsilon(1e-13));
  }
}
