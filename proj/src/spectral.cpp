#include "cavspdc/spectral.hpp"

#include <cmath>
#include <numbers>

#include "cavspdc/error.hpp"

namespace cavspdc::spectral {

namespace {

// Argument where sinc^2 drops to half maximum.
constexpr double kSincHalfMax = 1.39155737825151;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// sinc^2 scale factor: weight(f) = sinc^2(a_per_ghz * f).
double sinc_scale(double pm_bandwidth_ghz, BandwidthConvention convention) {
  return convention == BandwidthConvention::Fwhm
             ? 2.0 * kSincHalfMax / pm_bandwidth_ghz
             : std::numbers::pi / pm_bandwidth_ghz;
}

}  // namespace

double line_fwhm_mhz(double fsr_ghz, double finesse) {
  if (!(fsr_ghz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "line_fwhm_mhz: fsr must be > 0");
  if (!(finesse > 1.0))
    throw Error(ErrorCode::InvalidArgument, "line_fwhm_mhz: finesse must be > 1");
  return 1000.0 * fsr_ghz / finesse;
}

double envelope_weight(double f_ghz, double pm_bandwidth_ghz, Envelope envelope,
                       BandwidthConvention convention) {
  if (!(pm_bandwidth_ghz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "envelope_weight: bandwidth must be > 0");
  if (envelope == Envelope::Gaussian) {
    const double z = f_ghz / pm_bandwidth_ghz;
    return std::exp(-4.0 * std::numbers::ln2 * z * z);
  }
  const double v = sinc(sinc_scale(pm_bandwidth_ghz, convention) * f_ghz);
  return v * v;
}

double central_fraction(double fsr_ghz, double pm_bandwidth_ghz, Envelope envelope,
                        BandwidthConvention convention) {
  if (!(fsr_ghz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "central_fraction: fsr must be > 0");
  if (!(fsr_ghz < pm_bandwidth_ghz))
    throw Error(ErrorCode::InvalidArgument,
                "central_fraction: requires fsr < pm_bandwidth");

  double sum = 1.0;  // w(0)
  if (envelope == Envelope::Gaussian) {
    for (int k = 1;; ++k) {
      const double w = envelope_weight(k * fsr_ghz, pm_bandwidth_ghz, envelope, convention);
      sum += 2.0 * w;
      if (w < 1e-18 * sum) break;
    }
  } else {
    // Direct sum of the sinc^2 comb plus the analytic 1/x^2 tail beyond the
    // cutoff; the tail remainder is far below 1e-9 of the total.
    const double a = sinc_scale(pm_bandwidth_ghz, convention) * fsr_ghz;
    constexpr int kCutoff = 200000;
    for (int k = 1; k <= kCutoff; ++k) {
      const double x = a * k;
      const double v = std::sin(x) / x;
      sum += 2.0 * v * v;
    }
    sum += 1.0 / (a * a * kCutoff);
  }
  return 1.0 / sum;
}

double brightness(double coincidence_rate_per_s_per_mw, double central_fraction,
                  double line_fwhm_mhz) {
  if (coincidence_rate_per_s_per_mw < 0.0)
    throw Error(ErrorCode::InvalidArgument, "brightness: rate must be >= 0");
  if (!(central_fraction > 0.0) || !(line_fwhm_mhz > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "brightness: fraction and line width must be > 0");
  return coincidence_rate_per_s_per_mw * central_fraction / line_fwhm_mhz;
}

double SpectralProfile::weight(int k) const {
  const std::size_t idx = static_cast<std::size_t>(std::abs(k));
  return idx < line_weights.size() ? line_weights[idx] : 0.0;
}

SpectralProfile make_profile(double fsr_ghz, double finesse, double pm_bandwidth_ghz,
                             Envelope envelope, BandwidthConvention convention) {
  SpectralProfile profile;
  profile.fsr_ghz = fsr_ghz;
  profile.finesse = finesse;
  profile.pm_bandwidth_ghz = pm_bandwidth_ghz;
  profile.line_fwhm_mhz = line_fwhm_mhz(fsr_ghz, finesse);

  // Stored lines stop once the remaining envelope weight is negligible or
  // the span passes four bandwidths, whichever comes first (the slow sinc^2
  // tail would otherwise demand millions of entries).
  const double total =
      1.0 / central_fraction(fsr_ghz, pm_bandwidth_ghz, envelope, convention);
  const int max_lines =
      static_cast<int>(std::ceil(4.0 * pm_bandwidth_ghz / fsr_ghz)) + 1;
  double covered = 1.0;
  profile.line_weights.push_back(1.0);
  for (int k = 1; covered < total * (1.0 - 1e-6) && k <= max_lines; ++k) {
    const double w = envelope_weight(k * fsr_ghz, pm_bandwidth_ghz, envelope, convention);
    profile.line_weights.push_back(w);
    covered += 2.0 * w;
  }
  return profile;
}

}  // namespace cavspdc::spectral
