#pragma once

#include <complex>
#include <vector>

#include "cavspdc/config.hpp"
#include "cavspdc/histogram.hpp"
#include "cavspdc/polarization.hpp"

namespace cavspdc::rate {

struct PeakEntry {
  int m = 0;
  double center_ps = 0.0;
  std::complex<double> amplitude;
};

/// Correlation peak train: one entry per time bin, ordered by m. The weight
/// law |A_m|^2 / |A_0|^2 = s^|m| and the phase law arg A_m = m*phi/2 are
/// inherited from peak_amplitude.
struct PeakTrain {
  std::vector<PeakEntry> entries;
  double box_width_ps = 0.0;
  double survival = 0.0;

  int m_max() const { return static_cast<int>(entries.size() / 2); }
  const PeakEntry& at(int m) const;
};

PeakTrain build_peak_train(const ExperimentConfig& config, int m_max);

/// Gaussian kernel for the arrival-time *difference*: two independent
/// detectors of the given FWHM combine to sigma = (FWHM/2.3548) * sqrt(2).
struct JitterKernel {
  double sigma_ps = 0.0;

  static JitterKernel from_detector_fwhm(double per_detector_fwhm_ps);
};

enum class PeakShape {
  PointMass,     // box width << sigma: peak treated as a point at m*tau_c
  BoxConvolved,  // exact box (x) Gaussian profile, for validation
};

struct ExpectationOptions {
  PeakShape shape = PeakShape::PointMass;
  double tail_sigmas = 8.5;  // ignore peak mass beyond this many sigma
};

/// Expected histogram: each peak weight is pair rate x duration x time-bin
/// probability x TT-TR detection weight, smeared by the jitter kernel and
/// integrated over bins, plus a uniform background per bin.
Histogram expected_histogram(const PeakTrain& train, const MeasurementConfig& measurement,
                             const JitterKernel& kernel, const DetectorConfig& detector,
                             double duration_s, const HistogramGeometry& geometry,
                             const OutcomeModel& model,
                             const ExpectationOptions& options = {});

/// Convenience: builds the train, kernel, geometry and outcome model from
/// the configuration (train extends past the histogram span so spillover
/// from outside peaks is included).
Histogram expected_histogram(const ExperimentConfig& config,
                             const MeasurementConfig& measurement, double duration_s,
                             const ExpectationOptions& options = {});

/// Per-time-bin ratio of +-45 to H-V window sums including jitter
/// spillover between adjacent peak windows:
///   r_obs(m) = sum_k L(k->m) w45(k) s^|k| / sum_k L(k->m) wHV(k) s^|k|,
/// where L(k->m) is the Gaussian mass from peak k inside window m.
/// Windows are [m*tau_c - tau_c/2, m*tau_c + tau_c/2). Entries carry
/// sigma = 0 (noiseless).
RatioCurve expected_ratio_curve(const ExperimentConfig& config, const JitterKernel& kernel,
                                int m_half_window);

/// Observed +-45/H-V ratio when a fraction beta of pairs comes from the
/// reflected pump; the non-compensated population contributes ratio 1/2.
double backward_pump_ratio(double r_interfering, double backward_fraction_beta,
                           EccOrientation orientation);

}  // namespace cavspdc::rate
