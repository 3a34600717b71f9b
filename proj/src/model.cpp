#include "cavspdc/model.hpp"

#include <cmath>
#include <numbers>

#include "cavspdc/error.hpp"

namespace cavspdc::model {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::complex<double> peak_amplitude(int m, double survival, double phase_rad) {
  if (!(survival > 0.0 && survival < 1.0))
    throw Error(ErrorCode::InvalidArgument, "peak_amplitude: survival must lie in (0,1)");
  const double magnitude = std::pow(survival, 0.5 * std::abs(m)) / (1.0 - survival);
  return std::polar(magnitude, 0.5 * m * phase_rad);
}

double coincidence_probability(int m, double phase_rad, double theta1_rad,
                               double theta2_rad) {
  const std::complex<double> twist = std::polar(1.0, m * phase_rad);
  const std::complex<double> amplitude =
      std::cos(theta1_rad) * std::sin(theta2_rad) +
      twist * std::sin(theta1_rad) * std::cos(theta2_rad);
  return 0.5 * std::norm(amplitude);
}

double ratio_law(int m, double phase_rad) {
  // Fold the phase to [0, pi] first: sin^2(m*phi/2) is invariant under both
  // m -> -m and phi -> 2*pi - phi, and folding makes the symmetry hold
  // bit-for-bit whenever the inputs themselves are exact.
  const double folded = std::abs(std::remainder(phase_rad, kTwoPi));
  const double sine = std::sin(0.5 * std::abs(m) * folded);
  return sine * sine;
}

double phase_from_temperature(double delta_t_celsius, double t_2pi_celsius) {
  if (!(t_2pi_celsius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "phase_from_temperature: T_2pi must be > 0");
  return kTwoPi * delta_t_celsius / t_2pi_celsius;
}

double visibility_from_ratio(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "visibility_from_ratio: ratio must lie in [0,1]");
  return (1.0 - ratio) / (1.0 + ratio);
}

double ratio_from_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "ratio_from_visibility: visibility must lie in [0,1]");
  return (1.0 - visibility) / (1.0 + visibility);
}

}  // namespace cavspdc::model
