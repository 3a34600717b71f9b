#pragma once

#include <array>
#include <cstdint>

#include "cavspdc/config.hpp"
#include "cavspdc/histogram.hpp"

namespace cavspdc::est {

/// Subtracts a uniform background rate: counts(i) -= rate * duration.
/// Negative bins are retained so peak sums stay unbiased.
Histogram background_correct(const Histogram& hist, double rate_hz_per_bin);

/// Sums bins whose centers fall in [m*tau_c - window/2, m*tau_c + window/2)
/// for m in [-m_half_window, m_half_window]. The variance estimate per
/// window is the summed (nonnegative) counts, i.e. the Poisson estimate.
PeakSums integrate_peaks(const Histogram& hist, double tau_c_ps, double window_ps,
                         int m_half_window);

/// Per-m ratio of +-45 to H-V sums with Gaussian error propagation of the
/// Poisson variances. Entries whose H-V sum falls below min_hv_counts are
/// dropped (their relative error is too large to constrain the fit).
RatioCurve ratio_curve_from_sums(const PeakSums& hv, const PeakSums& pm45,
                                 double min_hv_counts = 25.0);

struct FitOptions {
  double grid_step_rad = 0.0078539816339744828;  // pi/400
  double refine_tol_rad = 1e-10;
  std::size_t min_distinct_m = 5;
  double t_2pi_celsius = 4.5;
};

struct FitResult {
  double phase_rad = 0.0;  // reported in [0, pi]
  double amplitude = 0.0;
  double offset = 0.0;
  std::array<std::array<double, 3>, 3> covariance{};  // (A, B, phase)
  double chi2 = 0.0;
  int dof = 0;
  double chi2_per_dof = 0.0;
  double period_roundtrips = 0.0;        // 2*pi / phase
  double temperature_equivalent_c = 0.0; // phase * T_2pi / (2*pi)
  // r(m) cannot distinguish phase from 2*pi - phase; the twin is reported
  // instead of guessed at.
  double alias_phase_rad = 0.0;

  double phase_sigma_rad() const;
};

/// Weighted least squares of r(m) = A sin^2(m*phase/2) + B: profile scan of
/// the phase over (0, pi] (linear solve for A, B at each grid point)
/// followed by golden-section refinement.
FitResult fit_phase(const RatioCurve& curve, const FitOptions& options = {});

struct BackwardPumpAnalysis {
  double interference_fraction = 0.0;
  double backward_pair_fraction = 0.0;
  double residual_ratio = 0.0;
  double pump_reflection = 0.0;
};

/// Exact algebraic inverse of rate::backward_pump_ratio. From the m = 0
/// ratios in the normal and rotated ECC orientations:
///   d_f = 1/2 - r_normal, d_b = 1/2 - r_rotated,
///   interference_fraction = (d_f + d_b) / (1/2),
///   beta = d_b / (d_f + d_b), residual = 1/2 - (d_f + d_b),
///   pump_reflection = beta / (1 - beta).
BackwardPumpAnalysis analyze_backward_pump(double r_normal, double r_rotated);

struct VisibilityReport {
  double ratio_total = 0.0;
  double ratio_sigma = 0.0;
  double visibility = 0.0;
  double visibility_sigma = 0.0;
};

/// Ratio of summed +-45 to summed H-V window counts over the whole window,
/// and the visibility V = (1-r)/(1+r) with propagated errors.
VisibilityReport visibility_report(const PeakSums& hv, const PeakSums& pm45);

struct AnalysisOptions {
  double t_2pi_celsius = 4.5;
  int m_half_window = 20;     // central 41 peaks
  double window_ps = 0.0;     // 0 = one roundtrip time
  double min_hv_counts = 25.0;
  FitOptions fit;
};

struct AnalysisResult {
  RatioCurve curve;
  FitResult fit;
  VisibilityReport visibility;
  double uncorrected_ratio_total = 0.0;
};

/// Full pipeline on a raw histogram pair: background correction, peak
/// integration, ratio curve, phase fit, visibility. Histograms must share
/// bin geometry; a duration mismatch is absorbed by scaling the +-45 sums
/// to the H-V duration.
AnalysisResult analyze_pair(const Histogram& hv_raw, double bg_hv_hz_per_bin,
                            const Histogram& pm45_raw, double bg_pm45_hz_per_bin,
                            double tau_c_ps, const AnalysisOptions& options = {});

}  // namespace cavspdc::est
