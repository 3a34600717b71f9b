#pragma once

#include <vector>

namespace cavspdc::spectral {

enum class Envelope { Sinc2, Gaussian };

/// How the quoted phase-matching bandwidth calibrates the sinc^2 envelope:
/// as its FWHM (default), or as the offset of the first null. The two
/// readings shift the central-line fraction by roughly 13%.
enum class BandwidthConvention { Fwhm, FirstNull };

/// Cavity line FWHM in MHz: 1000 * fsr / finesse.
double line_fwhm_mhz(double fsr_ghz, double finesse);

/// Phase-matching envelope weight at frequency offset f from degeneracy,
/// normalized to 1 at f = 0.
double envelope_weight(double f_ghz, double pm_bandwidth_ghz, Envelope envelope,
                       BandwidthConvention convention = BandwidthConvention::Fwhm);

/// Fraction of the total pair flux in the central cavity line:
/// w(0) / sum_k w(k * fsr). Requires fsr < pm_bandwidth.
double central_fraction(double fsr_ghz, double pm_bandwidth_ghz, Envelope envelope,
                        BandwidthConvention convention = BandwidthConvention::Fwhm);

/// Normalized brightness: rate * central_fraction / line_fwhm, in
/// pairs/(s * mW * MHz).
double brightness(double coincidence_rate_per_s_per_mw, double central_fraction,
                  double line_fwhm_mhz);

struct SpectralProfile {
  double fsr_ghz = 0.0;
  double finesse = 0.0;
  double pm_bandwidth_ghz = 0.0;
  double line_fwhm_mhz = 0.0;
  // Envelope weight per line index k >= 0 (symmetric in k), truncated once
  // the discarded weight is below 1e-6 of the total.
  std::vector<double> line_weights;

  double weight(int k) const;
};

SpectralProfile make_profile(double fsr_ghz, double finesse, double pm_bandwidth_ghz,
                             Envelope envelope = Envelope::Sinc2,
                             BandwidthConvention convention = BandwidthConvention::Fwhm);

}  // namespace cavspdc::spectral
