#include "cavspdc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "cavspdc/error.hpp"

namespace cavspdc::est {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct WeightedCurve {
  std::vector<int> m;
  std::vector<double> r;
  std::vector<double> w;
};

WeightedCurve weighted_view(const RatioCurve& curve) {
  WeightedCurve view;
  view.m.reserve(curve.entries.size());
  view.r.reserve(curve.entries.size());
  view.w.reserve(curve.entries.size());
  double min_sigma = std::numeric_limits<double>::infinity();
  bool any_sigma = false;
  for (const RatioEntry& e : curve.entries) {
    if (e.sigma > 0.0) {
      any_sigma = true;
      min_sigma = std::min(min_sigma, e.sigma);
    }
  }
  for (const RatioEntry& e : curve.entries) {
    view.m.push_back(e.m);
    view.r.push_back(e.ratio);
    if (!any_sigma) {
      view.w.push_back(1.0);  // noiseless curve: plain least squares
    } else {
      const double sigma = e.sigma > 0.0 ? e.sigma : min_sigma;
      view.w.push_back(1.0 / (sigma * sigma));
    }
  }
  return view;
}

struct ProfilePoint {
  double amplitude = 0.0;
  double offset = 0.0;
  double chi2 = 0.0;
};

// For a fixed phase the model is linear in (A, B); solve the 2x2 normal
// equations and return the resulting chi^2.
ProfilePoint solve_linear(const WeightedCurve& c, double phase) {
  double sw = 0.0, swx = 0.0, swxx = 0.0, swy = 0.0, swxy = 0.0;
  for (std::size_t i = 0; i < c.m.size(); ++i) {
    const double sine = std::sin(0.5 * c.m[i] * phase);
    const double x = sine * sine;
    sw += c.w[i];
    swx += c.w[i] * x;
    swxx += c.w[i] * x * x;
    swy += c.w[i] * c.r[i];
    swxy += c.w[i] * x * c.r[i];
  }
  ProfilePoint point;
  const double denom = sw * swxx - swx * swx;
  if (std::abs(denom) < 1e-30 * std::max(1.0, sw * swxx)) {
    point.amplitude = 0.0;
    point.offset = sw > 0.0 ? swy / sw : 0.0;
  } else {
    point.amplitude = (sw * swxy - swx * swy) / denom;
    point.offset = (swy - point.amplitude * swx) / sw;
  }
  for (std::size_t i = 0; i < c.m.size(); ++i) {
    const double sine = std::sin(0.5 * c.m[i] * phase);
    const double model = point.amplitude * sine * sine + point.offset;
    const double resid = c.r[i] - model;
    point.chi2 += c.w[i] * resid * resid;
  }
  return point;
}

double profile_chi2(const WeightedCurve& c, double phase) {
  return solve_linear(c, phase).chi2;
}

// Golden-section minimization of the chi^2 profile over [lo, hi].
double refine_minimum(const WeightedCurve& c, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = profile_chi2(c, x1);
  double f2 = profile_chi2(c, x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = profile_chi2(c, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = profile_chi2(c, x2);
    }
  }
  return 0.5 * (a + b);
}

bool invert3x3(const double m[3][3], double out[3][3]) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(m[i][j]));
  if (std::abs(det) < 1e-12 * scale * scale * scale) return false;
  const double inv_det = 1.0 / det;
  out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
  out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
  out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
  out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
  out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
  out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
  out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
  out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
  out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
  return true;
}

}  // namespace

Histogram background_correct(const Histogram& hist, double rate_hz_per_bin) {
  if (rate_hz_per_bin < 0.0)
    throw Error(ErrorCode::InvalidArgument, "background_correct: rate must be >= 0");
  Histogram out = hist;
  const double correction = rate_hz_per_bin * hist.duration_s;
  for (double& c : out.counts) c -= correction;
  return out;
}

PeakSums integrate_peaks(const Histogram& hist, double tau_c_ps, double window_ps,
                         int m_half_window) {
  if (!(tau_c_ps > 0.0) || !(window_ps > 0.0) || m_half_window < 0)
    throw Error(ErrorCode::InvalidArgument, "integrate_peaks: invalid window parameters");
  if (window_ps > tau_c_ps * (1.0 + 1e-12))
    throw Error(ErrorCode::Config,
                "integrate_peaks: window wider than one roundtrip would overlap "
                "neighboring peaks");

  PeakSums sums;
  sums.window_ps = window_ps;
  const double w = hist.bin_width_ps;
  for (int m = -m_half_window; m <= m_half_window; ++m) {
    const double lo = m * tau_c_ps - 0.5 * window_ps;
    const double hi = m * tau_c_ps + 0.5 * window_ps;
    // bins whose centers fall in [lo, hi)
    int first = static_cast<int>(std::ceil((lo - hist.origin_ps) / w - 0.5));
    int last_excl = static_cast<int>(std::ceil((hi - hist.origin_ps) / w - 0.5));
    first = std::max(first, 0);
    last_excl = std::min(last_excl, hist.n_bins());
    double sum = 0.0;
    double variance = 0.0;
    for (int i = first; i < last_excl; ++i) {
      const double c = hist.counts[static_cast<std::size_t>(i)];
      sum += c;
      variance += std::max(c, 0.0);
    }
    sums.m.push_back(m);
    sums.sum.push_back(sum);
    sums.variance.push_back(variance);
    sums.bins_in_window.push_back(std::max(0, last_excl - first));
  }
  return sums;
}

RatioCurve ratio_curve_from_sums(const PeakSums& hv, const PeakSums& pm45,
                                 double min_hv_counts) {
  if (hv.size() != pm45.size())
    throw Error(ErrorCode::InvalidArgument, "ratio_curve_from_sums: mismatched windows");
  RatioCurve curve;
  for (std::size_t i = 0; i < hv.size(); ++i) {
    if (hv.m[i] != pm45.m[i])
      throw Error(ErrorCode::InvalidArgument, "ratio_curve_from_sums: mismatched time bins");
    const double denom = hv.sum[i];
    if (!(denom >= min_hv_counts) || denom <= 0.0) continue;
    const double ratio = pm45.sum[i] / denom;
    const double var = pm45.variance[i] / (denom * denom) +
                       pm45.sum[i] * pm45.sum[i] * hv.variance[i] /
                           (denom * denom * denom * denom);
    curve.entries.push_back({hv.m[i], ratio, std::sqrt(std::max(var, 0.0))});
  }
  return curve;
}

double FitResult::phase_sigma_rad() const { return std::sqrt(std::max(covariance[2][2], 0.0)); }

FitResult fit_phase(const RatioCurve& curve, const FitOptions& options) {
  std::set<int> distinct;
  bool any_nonzero = false;
  for (const RatioEntry& e : curve.entries) {
    distinct.insert(std::abs(e.m));
    if (e.ratio != 0.0) any_nonzero = true;
  }
  if (distinct.size() < options.min_distinct_m)
    throw Error(ErrorCode::InvalidArgument,
                "fit_phase: need at least " + std::to_string(options.min_distinct_m) +
                    " distinct |m| values");
  if (!any_nonzero)
    throw Error(ErrorCode::FitDegenerate, "fit_phase: every ratio is zero");

  double r_min = std::numeric_limits<double>::infinity();
  double r_max = -std::numeric_limits<double>::infinity();
  for (const RatioEntry& e : curve.entries) {
    r_min = std::min(r_min, e.ratio);
    r_max = std::max(r_max, e.ratio);
  }
  if (r_max - r_min <= 1e-14 * std::max(1.0, std::abs(r_max))) {
    std::ostringstream os;
    os << "fit_phase: ratio curve is flat at " << r_max
       << " over " << curve.entries.size() << " bins; no phase information";
    throw Error(ErrorCode::FitDegenerate, os.str());
  }

  const WeightedCurve view = weighted_view(curve);

  const double step = std::min(options.grid_step_rad, kPi / 200.0);
  double best_phase = step;
  double best_chi2 = std::numeric_limits<double>::infinity();
  const int n_steps = static_cast<int>(std::ceil(kPi / step));
  for (int i = 1; i <= n_steps; ++i) {
    const double phase = std::min(i * step, kPi);
    const double chi2 = profile_chi2(view, phase);
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best_phase = phase;
    }
  }

  const double lo = std::max(best_phase - step, 0.5 * options.refine_tol_rad);
  const double hi = std::min(best_phase + step, kPi);
  const double phase = refine_minimum(view, lo, hi, options.refine_tol_rad);
  const ProfilePoint solution = solve_linear(view, phase);

  FitResult result;
  result.phase_rad = phase;
  result.amplitude = solution.amplitude;
  result.offset = solution.offset;
  result.chi2 = solution.chi2;
  result.dof = static_cast<int>(curve.entries.size()) - 3;
  result.chi2_per_dof = result.dof > 0 ? solution.chi2 / result.dof : 0.0;
  result.period_roundtrips = kTwoPi / phase;
  result.temperature_equivalent_c = phase * options.t_2pi_celsius / kTwoPi;
  result.alias_phase_rad = kTwoPi - phase;

  // Covariance from the Gauss-Newton normal matrix at the optimum. At
  // phase = pi the phase derivative vanishes for every integer m, so fall
  // back to the numeric curvature of the chi^2 profile there.
  double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (std::size_t i = 0; i < view.m.size(); ++i) {
    const double sine = std::sin(0.5 * view.m[i] * phase);
    const double jac[3] = {sine * sine, 1.0,
                           solution.amplitude * 0.5 * view.m[i] * std::sin(view.m[i] * phase)};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) jtj[a][b] += view.w[i] * jac[a] * jac[b];
  }
  double cov[3][3];
  if (invert3x3(jtj, cov)) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) result.covariance[a][b] = cov[a][b];
  } else {
    const double delta = step;
    const double chi_minus = profile_chi2(view, std::max(phase - delta, 1e-12));
    const double chi_plus = profile_chi2(view, std::min(phase + delta, kPi));
    const double curvature = (chi_plus - 2.0 * solution.chi2 + chi_minus) / (delta * delta);
    const double var_phase =
        curvature > 0.0 ? 2.0 / curvature : std::numeric_limits<double>::infinity();
    double ab[3][3] = {{jtj[0][0], jtj[0][1], 0}, {jtj[1][0], jtj[1][1], 0}, {0, 0, 1}};
    double ab_inv[3][3];
    if (invert3x3(ab, ab_inv)) {
      result.covariance[0][0] = ab_inv[0][0];
      result.covariance[0][1] = ab_inv[0][1];
      result.covariance[1][0] = ab_inv[1][0];
      result.covariance[1][1] = ab_inv[1][1];
    }
    result.covariance[2][2] = var_phase;
  }
  return result;
}

BackwardPumpAnalysis analyze_backward_pump(double r_normal, double r_rotated) {
  if (!(r_normal >= 0.0 && r_normal <= 0.5) || !(r_rotated >= 0.0 && r_rotated <= 0.5))
    throw Error(ErrorCode::InvalidArgument,
                "analyze_backward_pump: ratios must lie in [0, 1/2]");
  const double dip_forward = 0.5 - r_normal;
  const double dip_backward = 0.5 - r_rotated;
  const double dip_sum = dip_forward + dip_backward;
  if (dip_sum <= 0.0)
    throw Error(ErrorCode::NoInterference,
                "analyze_backward_pump: no interference dip in either orientation");

  BackwardPumpAnalysis analysis;
  analysis.interference_fraction = dip_sum / 0.5;
  analysis.backward_pair_fraction = dip_backward / dip_sum;
  analysis.residual_ratio = 0.5 - dip_sum;
  analysis.pump_reflection =
      analysis.backward_pair_fraction / (1.0 - analysis.backward_pair_fraction);
  return analysis;
}

VisibilityReport visibility_report(const PeakSums& hv, const PeakSums& pm45) {
  if (hv.size() != pm45.size())
    throw Error(ErrorCode::InvalidArgument, "visibility_report: mismatched windows");
  double hv_total = 0.0, pm_total = 0.0, hv_var = 0.0, pm_var = 0.0;
  for (std::size_t i = 0; i < hv.size(); ++i) {
    hv_total += hv.sum[i];
    pm_total += pm45.sum[i];
    hv_var += hv.variance[i];
    pm_var += pm45.variance[i];
  }
  if (hv_total <= 0.0)
    throw Error(ErrorCode::DivisionDomain, "visibility_report: H-V total is zero");

  VisibilityReport report;
  report.ratio_total = pm_total / hv_total;
  const double var = pm_var / (hv_total * hv_total) +
                     pm_total * pm_total * hv_var / std::pow(hv_total, 4.0);
  report.ratio_sigma = std::sqrt(std::max(var, 0.0));
  const double r = std::clamp(report.ratio_total, 0.0, 1.0);
  report.visibility = (1.0 - r) / (1.0 + r);
  report.visibility_sigma = 2.0 * report.ratio_sigma / ((1.0 + r) * (1.0 + r));
  return report;
}

AnalysisResult analyze_pair(const Histogram& hv_raw, double bg_hv_hz_per_bin,
                            const Histogram& pm45_raw, double bg_pm45_hz_per_bin,
                            double tau_c_ps, const AnalysisOptions& options) {
  if (!hv_raw.same_geometry(pm45_raw))
    throw Error(ErrorCode::Config, "analyze_pair: histograms do not share bin geometry");

  const double window = options.window_ps > 0.0 ? options.window_ps : tau_c_ps;

  const Histogram hv_corr = background_correct(hv_raw, bg_hv_hz_per_bin);
  const Histogram pm_corr = background_correct(pm45_raw, bg_pm45_hz_per_bin);

  PeakSums hv_sums = integrate_peaks(hv_corr, tau_c_ps, window, options.m_half_window);
  PeakSums pm_sums = integrate_peaks(pm_corr, tau_c_ps, window, options.m_half_window);
  const PeakSums hv_raw_sums =
      integrate_peaks(hv_raw, tau_c_ps, window, options.m_half_window);
  const PeakSums pm_raw_sums =
      integrate_peaks(pm45_raw, tau_c_ps, window, options.m_half_window);

  // Poisson variance belongs to the raw counts, not the corrected ones.
  hv_sums.variance = hv_raw_sums.variance;
  pm_sums.variance = pm_raw_sums.variance;

  // A duration mismatch scales the +-45 side to the H-V duration.
  if (pm45_raw.duration_s > 0.0 && hv_raw.duration_s != pm45_raw.duration_s) {
    const double scale = hv_raw.duration_s / pm45_raw.duration_s;
    for (double& v : pm_sums.sum) v *= scale;
    for (double& v : pm_sums.variance) v *= scale * scale;
  }

  AnalysisResult result;
  result.curve = ratio_curve_from_sums(hv_sums, pm_sums, options.min_hv_counts);
  FitOptions fit_options = options.fit;
  fit_options.t_2pi_celsius = options.t_2pi_celsius;
  result.fit = fit_phase(result.curve, fit_options);
  result.visibility = visibility_report(hv_sums, pm_sums);

  double hv_uncorrected = 0.0, pm_uncorrected = 0.0;
  for (std::size_t i = 0; i < hv_raw_sums.size(); ++i) {
    hv_uncorrected += hv_raw_sums.sum[i];
    pm_uncorrected += pm_raw_sums.sum[i];
  }
  result.uncorrected_ratio_total =
      hv_uncorrected > 0.0 ? pm_uncorrected / hv_uncorrected : 0.0;
  return result;
}

}  // namespace cavspdc::est
