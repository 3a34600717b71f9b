#include "cavspdc/histogram.hpp"

#include <cmath>

#include "cavspdc/error.hpp"

namespace cavspdc {

HistogramGeometry make_geometry(double tau_c_ps, double bin_width_ps, int m_span) {
  if (!(tau_c_ps > 0.0) || !(bin_width_ps > 0.0) || m_span < 0)
    throw Error(ErrorCode::InvalidArgument, "make_geometry: invalid span parameters");
  const double half_span = (m_span + 0.5) * tau_c_ps;
  // odd bin count so tau = 0 sits in the middle of the central bin
  const int half_bins =
      static_cast<int>(std::ceil((half_span - 0.5 * bin_width_ps) / bin_width_ps));
  const int n_bins = 2 * half_bins + 1;
  return {bin_width_ps, -0.5 * n_bins * bin_width_ps, n_bins};
}

double Histogram::total() const {
  double sum = 0.0;
  for (double c : counts) sum += c;
  return sum;
}

bool Histogram::same_geometry(const Histogram& other, double tol_ps) const {
  return counts.size() == other.counts.size() &&
         std::abs(bin_width_ps - other.bin_width_ps) <= tol_ps &&
         std::abs(origin_ps - other.origin_ps) <= tol_ps;
}

Histogram Histogram::zeros(const HistogramGeometry& geom, double duration_s) {
  Histogram h;
  h.bin_width_ps = geom.bin_width_ps;
  h.origin_ps = geom.origin_ps;
  h.duration_s = duration_s;
  h.counts.assign(static_cast<std::size_t>(geom.n_bins), 0.0);
  return h;
}

}  // namespace cavspdc
