#include "cavspdc/polarization.hpp"

#include <cmath>

namespace cavspdc {

OutcomeModel OutcomeModel::from_config(const ExperimentConfig& config,
                                       const MeasurementConfig& measurement) {
  OutcomeModel model;
  model.phase_rad = config.cavity.birefringence_phase_rad;
  model.analyzer_angle_rad = measurement.analyzer_angle_rad();
  model.backward_pair_fraction = config.pump.backward_pair_fraction();
  model.compensation_fraction = config.crystal.compensation_fraction;
  model.forward_interferes = config.crystal.ecc_orientation == EccOrientation::Normal;
  model.refresh_cache();
  return model;
}

void OutcomeModel::refresh_cache() {
  const double c = std::cos(analyzer_angle_rad);
  const double s = std::sin(analyzer_angle_rad);
  const double c2 = c * c;
  const double s2 = s * s;
  c4 = c2 * c2 + s2 * s2;
  q = 2.0 * c2 * s2;
}

double OutcomeModel::interfering_probability(int m) const {
  // |cos^2(t) - e^{i m phi} sin^2(t)|^2 / 2, the TT-TR split probability of
  // the phase-sensitive pair. Reduces to 1/2 in H-V and sin^2(m phi/2)/2 at
  // +-45 degrees.
  return 0.5 * (c4 - q * std::cos(m * phase_rad));
}

double OutcomeModel::mixture_probability() const { return 0.5 * c4; }

double OutcomeModel::tt_tr_probability(int m) const {
  const double p_role =
      forward_interferes ? 1.0 - backward_pair_fraction : backward_pair_fraction;
  const double mix = mixture_probability();
  const double compensated = compensation_fraction * interfering_probability(m) +
                             (1.0 - compensation_fraction) * mix;
  return p_role * compensated + (1.0 - p_role) * mix;
}

double OutcomeModel::detection_weight(int m) const {
  return 0.5 * tt_tr_probability(m);
}

}  // namespace cavspdc
