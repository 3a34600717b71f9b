#pragma once

#include <vector>

namespace cavspdc {

struct HistogramGeometry {
  double bin_width_ps = 1.0;
  double origin_ps = 0.0;  // left edge of bin 0
  int n_bins = 1;
};

/// Symmetric binning around tau = 0 covering |m| <= m_span roundtrip
/// windows; the middle bin is centered on tau = 0.
HistogramGeometry make_geometry(double tau_c_ps, double bin_width_ps, int m_span);

/// Arrival-time-difference histogram. Sampled histograms carry integer
/// counts; expected and background-corrected ones are real-valued.
struct Histogram {
  double bin_width_ps = 1.0;
  double origin_ps = 0.0;
  double duration_s = 1.0;
  std::vector<double> counts;

  int n_bins() const { return static_cast<int>(counts.size()); }
  double left_edge_ps(int i) const { return origin_ps + i * bin_width_ps; }
  double bin_center_ps(int i) const { return origin_ps + (i + 0.5) * bin_width_ps; }
  double total() const;

  bool same_geometry(const Histogram& other, double tol_ps = 1e-9) const;

  bool operator==(const Histogram&) const = default;

  static Histogram zeros(const HistogramGeometry& geom, double duration_s);
};

/// Per-time-bin window sums with Poisson variance estimates.
struct PeakSums {
  std::vector<int> m;
  std::vector<double> sum;
  std::vector<double> variance;
  std::vector<int> bins_in_window;
  double window_ps = 0.0;

  std::size_t size() const { return m.size(); }
};

struct RatioEntry {
  int m = 0;
  double ratio = 0.0;
  double sigma = 0.0;  // standard error; 0 for noiseless analytic curves
};

struct RatioCurve {
  std::vector<RatioEntry> entries;  // sorted by m
};

}  // namespace cavspdc
