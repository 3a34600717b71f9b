#include "cavspdc/cavspdc.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "cavspdc/error.hpp"
#include "cavspdc/io.hpp"
#include "cavspdc/mc.hpp"
#include "cavspdc/rate.hpp"

struct cavspdc_config_t {
  cavspdc::ExperimentConfig config;
};

struct cavspdc_histogram_t {
  cavspdc::io::HistogramFile file;
};

namespace {

thread_local std::string g_last_error;

cavspdc_status status_from(const cavspdc::Error& error) {
  using cavspdc::ErrorCode;
  switch (error.code()) {
    case ErrorCode::InvalidArgument: return CAVSPDC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config: return CAVSPDC_ERR_CONFIG;
    case ErrorCode::Io: return CAVSPDC_ERR_IO;
    case ErrorCode::FitDegenerate:
    case ErrorCode::NoInterference:
    case ErrorCode::DivisionDomain: return CAVSPDC_ERR_NUMERIC;
    case ErrorCode::Capacity: return CAVSPDC_ERR_CAPACITY;
  }
  return CAVSPDC_ERR_INTERNAL;
}

template <typename Fn>
cavspdc_status guarded(Fn&& fn) {
  try {
    fn();
    return CAVSPDC_OK;
  } catch (const cavspdc::Error& e) {
    g_last_error = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CAVSPDC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return CAVSPDC_ERR_INTERNAL;
  }
}

cavspdc_status fail(cavspdc_status status, const char* message) {
  g_last_error = message;
  return status;
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

cavspdc::MeasurementConfig measurement_for(const cavspdc::ExperimentConfig& config,
                                           const char* basis) {
  using cavspdc::Basis;
  const Basis parsed = cavspdc::basis_from_string(basis ? basis : "hv");
  switch (parsed) {
    case Basis::HV: return cavspdc::MeasurementConfig::hv();
    case Basis::PM45: return cavspdc::MeasurementConfig::pm45();
    case Basis::Custom:
      return cavspdc::MeasurementConfig::custom(config.measurement.hwp_angle_t_rad,
                                                config.measurement.hwp_angle_r_rad);
  }
  return cavspdc::MeasurementConfig::hv();
}

cavspdc_histogram_t* wrap_histogram(cavspdc::Histogram hist, const char* basis,
                                    const cavspdc::ExperimentConfig& config,
                                    bool has_seed, uint64_t seed) {
  auto* handle = new cavspdc_histogram_t;
  handle->file.histogram = std::move(hist);
  handle->file.basis = basis;
  if (has_seed) handle->file.seed = seed;
  handle->file.config_hash = cavspdc::io::config_hash_hex(config);
  handle->file.tau_c_ps = config.cavity.roundtrip_time_ps;
  handle->file.background_hz_per_bin =
      config.detector.background_rate_for(cavspdc::basis_from_string(basis));
  return handle;
}

}  // namespace

extern "C" {

const char* cavspdc_version(void) { return "0.1.0"; }

const char* cavspdc_last_error(void) { return g_last_error.c_str(); }

cavspdc_status cavspdc_config_default(cavspdc_config_t** out) {
  if (out == nullptr) return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new cavspdc_config_t{}; });
}

cavspdc_status cavspdc_config_load(const char* path, cavspdc_config_t** out) {
  if (path == nullptr || out == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* handle = new cavspdc_config_t;
    try {
      handle->config = cavspdc::io::load_config(path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

cavspdc_status cavspdc_config_parse(const char* json_text, cavspdc_config_t** out) {
  if (json_text == nullptr || out == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* handle = new cavspdc_config_t;
    try {
      handle->config = cavspdc::io::parse_config(json_text);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

cavspdc_status cavspdc_config_set(cavspdc_config_t* config, const char* dotted_key,
                                  const char* json_value) {
  if (config == nullptr || dotted_key == nullptr || json_value == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    // Rebuild through the parser so unknown keys, types and invariants get
    // the same treatment as a file override.
    const std::string key(dotted_key);
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= key.size())
      throw cavspdc::Error(cavspdc::ErrorCode::Config,
                           "expected a section.field key, got '" + key + "'");
    nlohmann::json root =
        nlohmann::json::parse(cavspdc::io::config_to_json(config->config, false));
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(json_value);
    } catch (const nlohmann::json::exception&) {
      // bare words (e.g. rotated) arrive unquoted from a command line
      value = std::string(json_value);
    }
    root[key.substr(0, dot)][key.substr(dot + 1)] = value;
    config->config = cavspdc::io::parse_config(root.dump());
  });
}

cavspdc_status cavspdc_config_to_json(const cavspdc_config_t* config, char** out_json) {
  if (config == nullptr || out_json == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out_json = copy_string(cavspdc::io::config_to_json(config->config, true));
    if (*out_json == nullptr) throw std::bad_alloc();
  });
}

cavspdc_status cavspdc_config_hash_hex(const cavspdc_config_t* config, char out_hex[17]) {
  if (config == nullptr || out_hex == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string hex = cavspdc::io::config_hash_hex(config->config);
    std::memcpy(out_hex, hex.c_str(), 17);
  });
}

uint64_t cavspdc_config_run_seed(const cavspdc_config_t* config) {
  return config == nullptr ? 0 : config->config.run.seed;
}

double cavspdc_config_run_duration_s(const cavspdc_config_t* config) {
  return config == nullptr ? 0.0 : config->config.run.duration_s;
}

void cavspdc_config_free(cavspdc_config_t* config) { delete config; }

cavspdc_status cavspdc_simulate(const cavspdc_config_t* config, const char* basis,
                                uint64_t seed, double duration_s,
                                cavspdc_histogram_t** out) {
  if (config == nullptr || basis == nullptr || out == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cavspdc::MeasurementConfig measurement =
        measurement_for(config->config, basis);
    cavspdc::mc::SimRun run = cavspdc::mc::SimRun::from_config(config->config);
    run.seed = seed;
    if (duration_s > 0.0) run.duration_s = duration_s;
    cavspdc::Histogram hist = cavspdc::mc::run_simulation(run, measurement);
    *out = wrap_histogram(std::move(hist), basis, config->config, true, seed);
  });
}

cavspdc_status cavspdc_expect(const cavspdc_config_t* config, const char* basis,
                              double duration_s, cavspdc_histogram_t** out) {
  if (config == nullptr || basis == nullptr || out == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cavspdc::MeasurementConfig measurement =
        measurement_for(config->config, basis);
    const double duration =
        duration_s > 0.0 ? duration_s : config->config.run.duration_s;
    cavspdc::Histogram hist =
        cavspdc::rate::expected_histogram(config->config, measurement, duration);
    *out = wrap_histogram(std::move(hist), basis, config->config, false, 0);
  });
}

cavspdc_status cavspdc_histogram_write(const cavspdc_histogram_t* hist, const char* path) {
  if (hist == nullptr || path == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { cavspdc::io::write_histogram(hist->file, path); });
}

cavspdc_status cavspdc_histogram_read(const char* path, cavspdc_histogram_t** out) {
  if (path == nullptr || out == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* handle = new cavspdc_histogram_t;
    try {
      handle->file = cavspdc::io::read_histogram(path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

size_t cavspdc_histogram_num_bins(const cavspdc_histogram_t* hist) {
  return hist == nullptr ? 0 : hist->file.histogram.counts.size();
}

double cavspdc_histogram_bin_width_ps(const cavspdc_histogram_t* hist) {
  return hist == nullptr ? 0.0 : hist->file.histogram.bin_width_ps;
}

double cavspdc_histogram_duration_s(const cavspdc_histogram_t* hist) {
  return hist == nullptr ? 0.0 : hist->file.histogram.duration_s;
}

double cavspdc_histogram_total(const cavspdc_histogram_t* hist) {
  return hist == nullptr ? 0.0 : hist->file.histogram.total();
}

size_t cavspdc_histogram_counts(const cavspdc_histogram_t* hist, double* buffer,
                                size_t buffer_len) {
  if (hist == nullptr || buffer == nullptr) return 0;
  const auto& counts = hist->file.histogram.counts;
  const size_t n = counts.size() < buffer_len ? counts.size() : buffer_len;
  std::memcpy(buffer, counts.data(), n * sizeof(double));
  return n;
}

void cavspdc_histogram_free(cavspdc_histogram_t* hist) { delete hist; }

cavspdc_status cavspdc_analyze(const cavspdc_histogram_t* hv,
                               const cavspdc_histogram_t* pm45, double t_2pi_celsius,
                               char** out_report_json) {
  if (hv == nullptr || pm45 == nullptr || out_report_json == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (hv->file.tau_c_ps <= 0.0)
      throw cavspdc::Error(cavspdc::ErrorCode::Config,
                           "H-V histogram header carries no roundtrip time");
    cavspdc::est::AnalysisOptions options;
    if (t_2pi_celsius > 0.0) options.t_2pi_celsius = t_2pi_celsius;
    const cavspdc::est::AnalysisResult result = cavspdc::est::analyze_pair(
        hv->file.histogram, hv->file.background_hz_per_bin, pm45->file.histogram,
        pm45->file.background_hz_per_bin, hv->file.tau_c_ps, options);
    *out_report_json = copy_string(
        cavspdc::io::analysis_report_json(result, hv->file, pm45->file, options));
    if (*out_report_json == nullptr) throw std::bad_alloc();
  });
}

cavspdc_status cavspdc_spectral(const cavspdc_config_t* config, double rate_per_s_per_mw,
                                char** out_report_json) {
  if (config == nullptr || out_report_json == nullptr)
    return fail(CAVSPDC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cavspdc::io::SpectralReport report =
        cavspdc::io::make_spectral_report(config->config, rate_per_s_per_mw);
    *out_report_json = copy_string(cavspdc::io::spectral_report_json(report));
    if (*out_report_json == nullptr) throw std::bad_alloc();
  });
}

void cavspdc_string_free(char* text) { std::free(text); }

}  // extern "C"
