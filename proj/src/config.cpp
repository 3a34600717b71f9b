#include "cavspdc/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cavspdc {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::Config, message);
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::FitDegenerate: return "degenerate fit";
    case ErrorCode::NoInterference: return "no interference";
    case ErrorCode::DivisionDomain: return "division domain error";
    case ErrorCode::Capacity: return "capacity exceeded";
  }
  return "unknown error";
}

double DetectorConfig::background_rate_for(Basis basis) const {
  // The custom basis has no measured background of its own; the H-V value
  // is the conservative stand-in.
  return basis == Basis::PM45 ? background_rate_hz_per_bin_pm45
                              : background_rate_hz_per_bin_hv;
}

MeasurementConfig MeasurementConfig::hv() { return {Basis::HV, 0.0, 0.0}; }

MeasurementConfig MeasurementConfig::pm45() { return {Basis::PM45, kPi / 8.0, 0.0}; }

MeasurementConfig MeasurementConfig::custom(double hwp_angle_t_rad, double hwp_angle_r_rad) {
  return {Basis::Custom, hwp_angle_t_rad, hwp_angle_r_rad};
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> warnings;

  require(cavity.roundtrip_time_ps > 0.0, "cavity.roundtrip_time_ps must be > 0");
  require(cavity.output_coupler_transmission > 0.0 &&
              cavity.output_coupler_transmission < 1.0,
          "cavity.output_coupler_transmission must lie in (0,1)");
  require(cavity.intracavity_loss_per_roundtrip >= 0.0 &&
              cavity.intracavity_loss_per_roundtrip < 1.0,
          "cavity.intracavity_loss_per_roundtrip must lie in [0,1)");
  require(cavity.output_coupler_transmission + cavity.intracavity_loss_per_roundtrip < 1.0,
          "cavity: transmission + loss must be < 1 (survival must stay positive)");
  require(cavity.fsr_ghz > 0.0, "cavity.fsr_ghz must be > 0");
  require(cavity.finesse > 1.0, "cavity.finesse must be > 1");

  const double fsr_product = cavity.fsr_ghz * cavity.roundtrip_time_ps;
  if (std::abs(fsr_product - 1000.0) > 10.0) {
    std::ostringstream os;
    os << "cavity: fsr_ghz * roundtrip_time_ps = " << fsr_product
       << ", more than 1% away from 1000";
    warnings.push_back(os.str());
  }

  require(crystal.box_width_ps > 0.0, "crystal.box_width_ps must be > 0");
  require(crystal.box_width_ps < cavity.roundtrip_time_ps,
          "crystal.box_width_ps must be smaller than the roundtrip time "
          "(peaks must not overlap)");
  require(crystal.pm_bandwidth_ghz > 0.0, "crystal.pm_bandwidth_ghz must be > 0");
  require(crystal.compensation_fraction >= 0.0 && crystal.compensation_fraction <= 1.0,
          "crystal.compensation_fraction must lie in [0,1]");
  require(crystal.t_2pi_celsius > 0.0, "crystal.t_2pi_celsius must be > 0");

  require(detector.jitter_fwhm_ps >= 0.0, "detector.jitter_fwhm_ps must be >= 0");
  require(detector.background_rate_hz_per_bin_hv >= 0.0,
          "detector.background_rate_hz_per_bin_hv must be >= 0");
  require(detector.background_rate_hz_per_bin_pm45 >= 0.0,
          "detector.background_rate_hz_per_bin_pm45 must be >= 0");
  require(detector.bin_width_ps > 0.0, "detector.bin_width_ps must be > 0");
  require(detector.bin_width_ps <= cavity.roundtrip_time_ps / 4.0,
          "detector.bin_width_ps must be <= roundtrip_time_ps / 4 "
          "(peaks must stay resolvable)");
  require(detector.pair_detection_rate_hz >= 0.0,
          "detector.pair_detection_rate_hz must be >= 0");

  require(pump.power_mw > 0.0, "pump.power_mw must be > 0");
  require(pump.wavelength_nm > 0.0, "pump.wavelength_nm must be > 0");
  require(pump.backward_reflection_fraction >= 0.0 &&
              pump.backward_reflection_fraction < 1.0,
          "pump.backward_reflection_fraction must lie in [0,1)");

  constexpr double angle_tol = 1e-9;
  if (measurement.basis == Basis::HV) {
    require(std::abs(measurement.hwp_angle_t_rad) <= angle_tol,
            "measurement: the hv basis requires hwp_angle_t_rad = 0");
  } else if (measurement.basis == Basis::PM45) {
    require(std::abs(measurement.hwp_angle_t_rad - kPi / 8.0) <= angle_tol,
            "measurement: the pm45 basis requires hwp_angle_t_rad = pi/8");
  }

  require(run.duration_s > 0.0, "run.duration_s must be > 0");
  require(run.m_span >= 1, "run.m_span must be >= 1");
  require(run.n_workers >= 0, "run.n_workers must be >= 0");

  return warnings;
}

const char* to_string(Basis basis) {
  switch (basis) {
    case Basis::HV: return "hv";
    case Basis::PM45: return "pm45";
    case Basis::Custom: return "custom";
  }
  return "hv";
}

const char* to_string(EccOrientation ecc) {
  return ecc == EccOrientation::Normal ? "normal" : "rotated";
}

Basis basis_from_string(const std::string& name) {
  if (name == "hv") return Basis::HV;
  if (name == "pm45") return Basis::PM45;
  if (name == "custom") return Basis::Custom;
  throw Error(ErrorCode::Config, "unknown basis '" + name + "' (expected hv, pm45 or custom)");
}

EccOrientation ecc_from_string(const std::string& name) {
  if (name == "normal") return EccOrientation::Normal;
  if (name == "rotated") return EccOrientation::Rotated;
  throw Error(ErrorCode::Config,
              "unknown ecc_orientation '" + name + "' (expected normal or rotated)");
}

}  // namespace cavspdc
