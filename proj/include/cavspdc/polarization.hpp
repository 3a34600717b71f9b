#pragma once

#include "cavspdc/config.hpp"

namespace cavspdc {

/// Probability model for a TT-TR coincidence given a pair's time-bin offset
/// m. A pair survives the 50-50 beam-splitter post-selection with
/// probability 1/2 (same-port pairs produce no TT-TR coincidence); the
/// analyzers then register the coincidence with a probability that is phase
/// sensitive for compensated pairs and fixed for distinguishable ones.
/// Shared between the analytic rate model and the event sampler so the two
/// stay consistent.
struct OutcomeModel {
  double phase_rad = 0.0;
  double analyzer_angle_rad = 0.0;       // 2 * HWP angle
  double backward_pair_fraction = 0.0;   // beta
  double compensation_fraction = 1.0;
  bool forward_interferes = true;        // normal ECC orientation

  static OutcomeModel from_config(const ExperimentConfig& config,
                                  const MeasurementConfig& measurement);

  /// Coincidence probability for a phase-sensitive (compensated) pair.
  double interfering_probability(int m) const;

  /// Coincidence probability for a distinguishable pair; basis dependent
  /// but independent of m, equal to half the H-V value in the +-45 basis.
  double mixture_probability() const;

  /// Mixture over forward/backward roles and compensation.
  double tt_tr_probability(int m) const;

  /// Expected TT-TR coincidences per generated pair in time bin m,
  /// including the 1/2 beam-splitter post-selection.
  double detection_weight(int m) const;

  // cached analyzer terms: c4 = cos^4 + sin^4, q = 2 cos^2 sin^2
  double c4 = 1.0;
  double q = 0.0;

  void refresh_cache();
};

}  // namespace cavspdc
