#include "cavspdc/rate.hpp"

#include <algorithm>
#include <cmath>

#include "cavspdc/error.hpp"
#include "cavspdc/model.hpp"
#include "cavspdc/stats.hpp"

namespace cavspdc::rate {

namespace {

// Sum of s^|m| over all integers m.
double geometric_norm(double survival) {
  return (1.0 + survival) / (1.0 - survival);
}

// Mass inside [lo, hi) of a unit box of width `box` centered at `center`,
// convolved with a Gaussian of width sigma.
double box_gaussian_mass(double lo, double hi, double center, double box, double sigma) {
  if (box <= 0.0) return stats::gaussian_mass(lo, hi, center, sigma);
  const double half = 0.5 * box;
  if (sigma <= 0.0) {
    const double overlap =
        std::max(0.0, std::min(hi, center + half) - std::max(lo, center - half));
    return overlap / box;
  }
  // integral of Phi is I(z) = z Phi(z) + pdf(z)
  const auto big_i = [](double z) {
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
    return z * stats::normal_cdf(z) + pdf;
  };
  const auto h = [&](double x) {
    return sigma * (big_i((x - center + half) / sigma) - big_i((x - center - half) / sigma));
  };
  return (h(hi) - h(lo)) / box;
}

}  // namespace

const PeakEntry& PeakTrain::at(int m) const {
  const int max = m_max();
  if (m < -max || m > max)
    throw Error(ErrorCode::InvalidArgument, "PeakTrain::at: time bin outside the train");
  return entries[static_cast<std::size_t>(m + max)];
}

PeakTrain build_peak_train(const ExperimentConfig& config, int m_max) {
  if (m_max < 0)
    throw Error(ErrorCode::InvalidArgument, "build_peak_train: m_max must be >= 0");
  PeakTrain train;
  train.box_width_ps = config.crystal.box_width_ps;
  train.survival = config.cavity.survival();
  train.entries.reserve(static_cast<std::size_t>(2 * m_max + 1));
  const double tau_c = config.cavity.roundtrip_time_ps;
  const double phi = config.cavity.birefringence_phase_rad;
  for (int m = -m_max; m <= m_max; ++m) {
    train.entries.push_back(
        {m, m * tau_c, model::peak_amplitude(m, train.survival, phi)});
  }
  return train;
}

JitterKernel JitterKernel::from_detector_fwhm(double per_detector_fwhm_ps) {
  if (per_detector_fwhm_ps < 0.0)
    throw Error(ErrorCode::InvalidArgument, "JitterKernel: FWHM must be >= 0");
  constexpr double fwhm_to_sigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)
  return {per_detector_fwhm_ps / fwhm_to_sigma * std::sqrt(2.0)};
}

Histogram expected_histogram(const PeakTrain& train, const MeasurementConfig& measurement,
                             const JitterKernel& kernel, const DetectorConfig& detector,
                             double duration_s, const HistogramGeometry& geometry,
                             const OutcomeModel& model, const ExpectationOptions& options) {
  if (!(duration_s > 0.0))
    throw Error(ErrorCode::InvalidArgument, "expected_histogram: duration must be > 0");
  Histogram hist = Histogram::zeros(geometry, duration_s);

  const double background =
      detector.background_rate_for(measurement.basis) * duration_s;
  for (double& c : hist.counts) c = background;

  const double total_pairs = detector.pair_detection_rate_hz * duration_s;
  if (total_pairs == 0.0) return hist;

  // Time-bin probabilities come from the peak weights normalized by the
  // closed-form infinite sum, so truncation shows up as missing mass rather
  // than a rescaled histogram.
  const double center_weight = std::norm(train.at(0).amplitude);
  const double norm = center_weight * geometric_norm(train.survival);

  const double w = geometry.bin_width_ps;
  const double reach =
      options.tail_sigmas * kernel.sigma_ps + 0.5 * train.box_width_ps + w;
  for (const PeakEntry& peak : train.entries) {
    const double p_m = std::norm(peak.amplitude) / norm;
    const double weight = total_pairs * p_m * model.detection_weight(peak.m);
    if (weight <= 0.0) continue;
    int first = static_cast<int>(std::floor((peak.center_ps - reach - geometry.origin_ps) / w));
    int last = static_cast<int>(std::ceil((peak.center_ps + reach - geometry.origin_ps) / w));
    first = std::max(first, 0);
    last = std::min(last, geometry.n_bins - 1);
    for (int i = first; i <= last; ++i) {
      const double lo = hist.left_edge_ps(i);
      const double hi = lo + w;
      const double mass =
          options.shape == PeakShape::PointMass
              ? stats::gaussian_mass(lo, hi, peak.center_ps, kernel.sigma_ps)
              : box_gaussian_mass(lo, hi, peak.center_ps, train.box_width_ps,
                                  kernel.sigma_ps);
      hist.counts[static_cast<std::size_t>(i)] += weight * mass;
    }
  }
  return hist;
}

Histogram expected_histogram(const ExperimentConfig& config,
                             const MeasurementConfig& measurement, double duration_s,
                             const ExpectationOptions& options) {
  config.validate();
  const JitterKernel kernel = JitterKernel::from_detector_fwhm(config.detector.jitter_fwhm_ps);
  const HistogramGeometry geometry = make_geometry(
      config.cavity.roundtrip_time_ps, config.detector.bin_width_ps, config.run.m_span);
  const int margin = static_cast<int>(
      std::ceil(options.tail_sigmas * kernel.sigma_ps / config.cavity.roundtrip_time_ps)) + 1;
  const PeakTrain train = build_peak_train(config, config.run.m_span + margin);
  const OutcomeModel model = OutcomeModel::from_config(config, measurement);
  return expected_histogram(train, measurement, kernel, config.detector, duration_s,
                            geometry, model, options);
}

RatioCurve expected_ratio_curve(const ExperimentConfig& config, const JitterKernel& kernel,
                                int m_half_window) {
  if (m_half_window < 0)
    throw Error(ErrorCode::InvalidArgument, "expected_ratio_curve: window must be >= 0");
  const double tau_c = config.cavity.roundtrip_time_ps;
  const double s = config.cavity.survival();
  const OutcomeModel model45 = OutcomeModel::from_config(config, MeasurementConfig::pm45());
  const OutcomeModel model_hv = OutcomeModel::from_config(config, MeasurementConfig::hv());

  const int spill = static_cast<int>(std::ceil(8.5 * kernel.sigma_ps / tau_c)) + 1;
  RatioCurve curve;
  curve.entries.reserve(static_cast<std::size_t>(2 * m_half_window + 1));
  for (int m = -m_half_window; m <= m_half_window; ++m) {
    const double lo = (m - 0.5) * tau_c;
    const double hi = (m + 0.5) * tau_c;
    double numerator = 0.0;
    double denominator = 0.0;
    for (int k = m - spill; k <= m + spill; ++k) {
      const double mass = stats::gaussian_mass(lo, hi, k * tau_c, kernel.sigma_ps);
      const double population = mass * std::pow(s, std::abs(k));
      numerator += population * model45.detection_weight(k);
      denominator += population * model_hv.detection_weight(k);
    }
    curve.entries.push_back({m, numerator / denominator, 0.0});
  }
  return curve;
}

double backward_pump_ratio(double r_interfering, double backward_fraction_beta,
                           EccOrientation orientation) {
  if (!(r_interfering >= 0.0 && r_interfering <= 1.0) ||
      !(backward_fraction_beta >= 0.0 && backward_fraction_beta <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "backward_pump_ratio: inputs must lie in [0,1]");
  const double beta = backward_fraction_beta;
  return orientation == EccOrientation::Normal
             ? (1.0 - beta) * r_interfering + beta * 0.5
             : (1.0 - beta) * 0.5 + beta * r_interfering;
}

}  // namespace cavspdc::rate
