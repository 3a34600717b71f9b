#pragma once

#include <complex>

namespace cavspdc::model {

/// Coefficient of the correlation peak at arrival-time difference m*tau_c
/// after summing the common-roundtrip series:
///   A_m = sqrt(s)^|m| * exp(i*m*phi/2) / (1 - s).
/// Requires survival in (0,1).
std::complex<double> peak_amplitude(int m, double survival, double phase_rad);

/// Coincidence probability between analyzers at theta1 and theta2 for the
/// time-bin state (|HV> + exp(i*m*phi)|VH>)/sqrt(2):
///   P = |cos(t1) sin(t2) + exp(i*m*phi) sin(t1) cos(t2)|^2 / 2.
double coincidence_probability(int m, double phase_rad, double theta1_rad,
                               double theta2_rad);

/// Per-time-bin ratio of +-45-basis to H-V-basis coincidences,
/// r(m) = sin^2(m*phi/2). Symmetric in m and in phi -> 2*pi - phi.
double ratio_law(int m, double phase_rad);

/// ICC temperature detuning to roundtrip birefringence: phi = 2*pi*T/T_2pi.
double phase_from_temperature(double delta_t_celsius, double t_2pi_celsius);

/// Quantum-interference visibility from the +-45/H-V ratio: V = (1-r)/(1+r).
double visibility_from_ratio(double ratio);

/// Inverse of visibility_from_ratio.
double ratio_from_visibility(double visibility);

}  // namespace cavspdc::model
