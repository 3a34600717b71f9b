#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavspdc/error.hpp"

namespace cavspdc {

enum class Basis { HV, PM45, Custom };
enum class EccOrientation { Normal, Rotated };

/// Single-ended cavity parameters. The photon survival probability per
/// roundtrip is 1 - transmission - loss; with the reference defaults
/// (92% coupler reflectivity, 3% other losses) this gives s = 0.89.
struct CavityConfig {
  double roundtrip_time_ps = 826.0;
  double output_coupler_transmission = 0.08;
  double intracavity_loss_per_roundtrip = 0.03;
  double birefringence_phase_rad = 0.0;
  double fsr_ghz = 1.21;
  double finesse = 55.0;

  double survival() const {
    return 1.0 - output_coupler_transmission - intracavity_loss_per_roundtrip;
  }
};

struct CrystalConfig {
  double box_width_ps = 3.5;        // time-domain phase-matching window
  double pm_bandwidth_ghz = 280.0;
  EccOrientation ecc_orientation = EccOrientation::Normal;
  double compensation_fraction = 1.0;  // 1 = perfectly matched ECC
  double t_2pi_celsius = 4.5;          // ICC detuning for a 2*pi roundtrip phase
};

struct DetectorConfig {
  double jitter_fwhm_ps = 350.0;  // per detector
  double background_rate_hz_per_bin_hv = 0.014;
  double background_rate_hz_per_bin_pm45 = 0.009;
  double bin_width_ps = 38.3;
  // Detected pairs reaching the analysis beam splitter per second. The
  // TT-TR coincidence rate is a quarter of this in the H-V basis, so the
  // default corresponds to the measured peak 2000 pairs/s per mW held at a
  // locked double resonance with 1 mW of pump.
  double pair_detection_rate_hz = 8000.0;

  double background_rate_for(Basis basis) const;
};

struct PumpConfig {
  double wavelength_nm = 397.5;  // informational
  double power_mw = 1.0;
  double backward_reflection_fraction = 0.0;  // P_back / P_forward

  /// Fraction of detected pairs generated by the backward pass.
  double backward_pair_fraction() const {
    return backward_reflection_fraction / (1.0 + backward_reflection_fraction);
  }
};

/// Analyzer settings for the transmitted arm. A half-wave plate at angle
/// theta rotates polarization by 2*theta, so theta_T = pi/8 selects the
/// +-45 degree basis.
struct MeasurementConfig {
  Basis basis = Basis::HV;
  double hwp_angle_t_rad = 0.0;
  double hwp_angle_r_rad = 0.0;

  double analyzer_angle_rad() const { return 2.0 * hwp_angle_t_rad; }

  static MeasurementConfig hv();
  static MeasurementConfig pm45();
  static MeasurementConfig custom(double hwp_angle_t_rad, double hwp_angle_r_rad);
};

struct RunConfig {
  double duration_s = 960.0;  // 16 minutes, as in the measured histograms
  std::uint64_t seed = 1;
  int n_workers = 0;      // 0 = CAVSPDC_WORKERS env var, else hardware threads
  int m_span = 24;        // histogram covers time bins |m| <= m_span
  bool explicit_loss = false;  // sample intracavity loss photon by photon
};

struct ExperimentConfig {
  CavityConfig cavity;
  CrystalConfig crystal;
  DetectorConfig detector;
  PumpConfig pump;
  MeasurementConfig measurement;
  RunConfig run;

  /// Throws Error{Config} on a violated invariant. Soft inconsistencies
  /// (e.g. FSR vs roundtrip time drifting apart) come back as warnings.
  std::vector<std::string> validate() const;
};

const char* to_string(Basis basis);
const char* to_string(EccOrientation ecc);
Basis basis_from_string(const std::string& name);
EccOrientation ecc_from_string(const std::string& name);

}  // namespace cavspdc
