#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavspdc/config.hpp"
#include "cavspdc/estimator.hpp"
#include "cavspdc/histogram.hpp"
#include "cavspdc/spectral.hpp"

namespace cavspdc::io {

/// Parses a JSON configuration. Every field is optional and defaults to the
/// reference value; unknown keys are rejected with their full path.
ExperimentConfig parse_config(const std::string& json_text,
                              std::vector<std::string>* warnings = nullptr);
ExperimentConfig load_config(const std::string& path,
                             std::vector<std::string>* warnings = nullptr);

std::string config_to_json(const ExperimentConfig& config, bool pretty = true);

/// FNV-1a over the canonical (sorted-key, compact) JSON rendering.
std::uint64_t config_hash(const ExperimentConfig& config);
std::string config_hash_hex(const ExperimentConfig& config);

/// Histogram plus the provenance header written to disk. tau_c and the
/// background rate ride along so analysis needs nothing but the two files.
struct HistogramFile {
  Histogram histogram;
  std::string basis = "hv";
  std::optional<std::uint64_t> seed;
  std::string config_hash;
  double tau_c_ps = 0.0;
  double background_hz_per_bin = 0.0;

  bool operator==(const HistogramFile&) const = default;
};

std::string histogram_to_csv(const HistogramFile& file);
std::string histogram_to_json(const HistogramFile& file);

/// Accepts either format (autodetected). Throws Error{Config} on malformed
/// or truncated content.
HistogramFile parse_histogram(const std::string& text);

void write_histogram(const HistogramFile& file, const std::string& path);  // by extension
HistogramFile read_histogram(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string analysis_report_json(const est::AnalysisResult& result,
                                 const HistogramFile& hv, const HistogramFile& pm45,
                                 const est::AnalysisOptions& options);

struct SpectralReport {
  double fsr_ghz = 0.0;
  double finesse = 0.0;
  double pm_bandwidth_ghz = 0.0;
  double line_fwhm_mhz = 0.0;
  double central_fraction = 0.0;
  double brightness = 0.0;
  double coincidence_rate_per_s_per_mw = 0.0;
  spectral::Envelope envelope = spectral::Envelope::Sinc2;
  spectral::BandwidthConvention convention = spectral::BandwidthConvention::Fwhm;
};

SpectralReport make_spectral_report(const ExperimentConfig& config,
                                    double coincidence_rate_per_s_per_mw,
                                    spectral::Envelope envelope = spectral::Envelope::Sinc2,
                                    spectral::BandwidthConvention convention =
                                        spectral::BandwidthConvention::Fwhm);
std::string spectral_report_json(const SpectralReport& report);

}  // namespace cavspdc::io
