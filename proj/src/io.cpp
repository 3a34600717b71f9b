#include "cavspdc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cavspdc::io {

namespace {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[40];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

double parse_double_field(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw Error(ErrorCode::Config, "malformed number '" + text + "' in " + where);
  return value;
}

// --- config schema -------------------------------------------------------

void reject_unknown_keys(const json& section, const std::string& prefix,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : section.items()) {
    bool found = false;
    for (const char* k : known)
      if (key == k) { found = true; break; }
    if (!found)
      throw Error(ErrorCode::Config, "unknown key: " + prefix + key);
  }
}

double get_number(const json& section, const char* key, const std::string& prefix,
                  double fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number())
    throw Error(ErrorCode::Config, "expected a number at " + prefix + key);
  return v.get<double>();
}

std::uint64_t get_u64(const json& section, const char* key, const std::string& prefix,
                      std::uint64_t fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number_unsigned())
    throw Error(ErrorCode::Config, "expected a nonnegative integer at " + prefix + key);
  return v.get<std::uint64_t>();
}

int get_int(const json& section, const char* key, const std::string& prefix,
            int fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number_integer())
    throw Error(ErrorCode::Config, "expected an integer at " + prefix + key);
  return v.get<int>();
}

bool get_bool(const json& section, const char* key, const std::string& prefix,
              bool fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_boolean())
    throw Error(ErrorCode::Config, "expected a boolean at " + prefix + key);
  return v.get<bool>();
}

std::string get_string(const json& section, const char* key, const std::string& prefix,
                       const std::string& fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_string())
    throw Error(ErrorCode::Config, "expected a string at " + prefix + key);
  return v.get<std::string>();
}

ExperimentConfig config_from_json(const json& root) {
  if (!root.is_object())
    throw Error(ErrorCode::Config, "configuration root must be a JSON object");
  reject_unknown_keys(root, "",
                      {"cavity", "crystal", "detector", "pump", "measurement", "run"});

  ExperimentConfig cfg;

  if (root.contains("cavity")) {
    const json& c = root.at("cavity");
    reject_unknown_keys(c, "cavity.",
                        {"roundtrip_time_ps", "output_coupler_transmission",
                         "intracavity_loss_per_roundtrip", "birefringence_phase_rad",
                         "fsr_ghz", "finesse"});
    cfg.cavity.roundtrip_time_ps =
        get_number(c, "roundtrip_time_ps", "cavity.", cfg.cavity.roundtrip_time_ps);
    cfg.cavity.output_coupler_transmission = get_number(
        c, "output_coupler_transmission", "cavity.", cfg.cavity.output_coupler_transmission);
    cfg.cavity.intracavity_loss_per_roundtrip =
        get_number(c, "intracavity_loss_per_roundtrip", "cavity.",
                   cfg.cavity.intracavity_loss_per_roundtrip);
    cfg.cavity.birefringence_phase_rad = get_number(c, "birefringence_phase_rad", "cavity.",
                                                    cfg.cavity.birefringence_phase_rad);
    cfg.cavity.fsr_ghz = get_number(c, "fsr_ghz", "cavity.", cfg.cavity.fsr_ghz);
    cfg.cavity.finesse = get_number(c, "finesse", "cavity.", cfg.cavity.finesse);
  }

  if (root.contains("crystal")) {
    const json& c = root.at("crystal");
    reject_unknown_keys(c, "crystal.",
                        {"box_width_ps", "pm_bandwidth_ghz", "ecc_orientation",
                         "compensation_fraction", "t_2pi_celsius"});
    cfg.crystal.box_width_ps =
        get_number(c, "box_width_ps", "crystal.", cfg.crystal.box_width_ps);
    cfg.crystal.pm_bandwidth_ghz =
        get_number(c, "pm_bandwidth_ghz", "crystal.", cfg.crystal.pm_bandwidth_ghz);
    cfg.crystal.ecc_orientation = ecc_from_string(
        get_string(c, "ecc_orientation", "crystal.", to_string(cfg.crystal.ecc_orientation)));
    cfg.crystal.compensation_fraction = get_number(c, "compensation_fraction", "crystal.",
                                                   cfg.crystal.compensation_fraction);
    cfg.crystal.t_2pi_celsius =
        get_number(c, "t_2pi_celsius", "crystal.", cfg.crystal.t_2pi_celsius);
  }

  if (root.contains("detector")) {
    const json& c = root.at("detector");
    reject_unknown_keys(c, "detector.",
                        {"jitter_fwhm_ps", "background_rate_hz_per_bin_hv",
                         "background_rate_hz_per_bin_pm45", "bin_width_ps",
                         "pair_detection_rate_hz"});
    cfg.detector.jitter_fwhm_ps =
        get_number(c, "jitter_fwhm_ps", "detector.", cfg.detector.jitter_fwhm_ps);
    cfg.detector.background_rate_hz_per_bin_hv =
        get_number(c, "background_rate_hz_per_bin_hv", "detector.",
                   cfg.detector.background_rate_hz_per_bin_hv);
    cfg.detector.background_rate_hz_per_bin_pm45 =
        get_number(c, "background_rate_hz_per_bin_pm45", "detector.",
                   cfg.detector.background_rate_hz_per_bin_pm45);
    cfg.detector.bin_width_ps =
        get_number(c, "bin_width_ps", "detector.", cfg.detector.bin_width_ps);
    cfg.detector.pair_detection_rate_hz = get_number(c, "pair_detection_rate_hz", "detector.",
                                                     cfg.detector.pair_detection_rate_hz);
  }

  if (root.contains("pump")) {
    const json& c = root.at("pump");
    reject_unknown_keys(c, "pump.",
                        {"wavelength_nm", "power_mw", "backward_reflection_fraction"});
    cfg.pump.wavelength_nm = get_number(c, "wavelength_nm", "pump.", cfg.pump.wavelength_nm);
    cfg.pump.power_mw = get_number(c, "power_mw", "pump.", cfg.pump.power_mw);
    cfg.pump.backward_reflection_fraction =
        get_number(c, "backward_reflection_fraction", "pump.",
                   cfg.pump.backward_reflection_fraction);
  }

  if (root.contains("measurement")) {
    const json& c = root.at("measurement");
    reject_unknown_keys(c, "measurement.",
                        {"basis", "hwp_angle_t_rad", "hwp_angle_r_rad"});
    const Basis basis =
        basis_from_string(get_string(c, "basis", "measurement.", "hv"));
    MeasurementConfig base = basis == Basis::HV    ? MeasurementConfig::hv()
                             : basis == Basis::PM45 ? MeasurementConfig::pm45()
                                                    : MeasurementConfig::custom(0.0, 0.0);
    base.hwp_angle_t_rad =
        get_number(c, "hwp_angle_t_rad", "measurement.", base.hwp_angle_t_rad);
    base.hwp_angle_r_rad =
        get_number(c, "hwp_angle_r_rad", "measurement.", base.hwp_angle_r_rad);
    cfg.measurement = base;
  }

  if (root.contains("run")) {
    const json& c = root.at("run");
    reject_unknown_keys(c, "run.",
                        {"duration_s", "seed", "n_workers", "m_span", "explicit_loss"});
    cfg.run.duration_s = get_number(c, "duration_s", "run.", cfg.run.duration_s);
    cfg.run.seed = get_u64(c, "seed", "run.", cfg.run.seed);
    cfg.run.n_workers = get_int(c, "n_workers", "run.", cfg.run.n_workers);
    cfg.run.m_span = get_int(c, "m_span", "run.", cfg.run.m_span);
    cfg.run.explicit_loss = get_bool(c, "explicit_loss", "run.", cfg.run.explicit_loss);
  }

  return cfg;
}

json config_to_json_object(const ExperimentConfig& c) {
  json root;
  root["cavity"] = {
      {"roundtrip_time_ps", c.cavity.roundtrip_time_ps},
      {"output_coupler_transmission", c.cavity.output_coupler_transmission},
      {"intracavity_loss_per_roundtrip", c.cavity.intracavity_loss_per_roundtrip},
      {"birefringence_phase_rad", c.cavity.birefringence_phase_rad},
      {"fsr_ghz", c.cavity.fsr_ghz},
      {"finesse", c.cavity.finesse},
  };
  root["crystal"] = {
      {"box_width_ps", c.crystal.box_width_ps},
      {"pm_bandwidth_ghz", c.crystal.pm_bandwidth_ghz},
      {"ecc_orientation", to_string(c.crystal.ecc_orientation)},
      {"compensation_fraction", c.crystal.compensation_fraction},
      {"t_2pi_celsius", c.crystal.t_2pi_celsius},
  };
  root["detector"] = {
      {"jitter_fwhm_ps", c.detector.jitter_fwhm_ps},
      {"background_rate_hz_per_bin_hv", c.detector.background_rate_hz_per_bin_hv},
      {"background_rate_hz_per_bin_pm45", c.detector.background_rate_hz_per_bin_pm45},
      {"bin_width_ps", c.detector.bin_width_ps},
      {"pair_detection_rate_hz", c.detector.pair_detection_rate_hz},
  };
  root["pump"] = {
      {"wavelength_nm", c.pump.wavelength_nm},
      {"power_mw", c.pump.power_mw},
      {"backward_reflection_fraction", c.pump.backward_reflection_fraction},
  };
  root["measurement"] = {
      {"basis", to_string(c.measurement.basis)},
      {"hwp_angle_t_rad", c.measurement.hwp_angle_t_rad},
      {"hwp_angle_r_rad", c.measurement.hwp_angle_r_rad},
  };
  root["run"] = {
      {"duration_s", c.run.duration_s},
      {"seed", c.run.seed},
      {"n_workers", c.run.n_workers},
      {"m_span", c.run.m_span},
      {"explicit_loss", c.run.explicit_loss},
  };
  return root;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = kFnvOffset;
  for (unsigned char byte : text) {
    hash ^= byte;
    hash *= kFnvPrime;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

json fit_to_json(const est::FitResult& fit) {
  json cov = json::array();
  for (int a = 0; a < 3; ++a) {
    json row = json::array();
    for (int b = 0; b < 3; ++b) row.push_back(fit.covariance[a][b]);
    cov.push_back(row);
  }
  return {
      {"phase_rad", fit.phase_rad},
      {"phase_sigma_rad", fit.phase_sigma_rad()},
      {"alias_phase_rad", fit.alias_phase_rad},
      {"amplitude", fit.amplitude},
      {"offset", fit.offset},
      {"covariance", cov},
      {"chi2", fit.chi2},
      {"dof", fit.dof},
      {"chi2_per_dof", fit.chi2_per_dof},
      {"period_roundtrips", fit.period_roundtrips},
      {"temperature_equivalent_c", fit.temperature_equivalent_c},
  };
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              std::vector<std::string>* warnings) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("configuration is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg = config_from_json(root);
  std::vector<std::string> found = cfg.validate();
  if (warnings) *warnings = std::move(found);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
  return parse_config(read_text_file(path), warnings);
}

std::string config_to_json(const ExperimentConfig& config, bool pretty) {
  return config_to_json_object(config).dump(pretty ? 2 : -1);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a(config_to_json(config, false));
}

std::string config_hash_hex(const ExperimentConfig& config) {
  return hex64(config_hash(config));
}

std::string histogram_to_csv(const HistogramFile& file) {
  const Histogram& h = file.histogram;
  std::ostringstream os;
  os << "# cavspdc histogram v1\n";
  os << "# config_hash=" << file.config_hash << "\n";
  os << "# seed=" << (file.seed ? std::to_string(*file.seed) : std::string("none")) << "\n";
  os << "# basis=" << file.basis << "\n";
  os << "# duration_s=" << format_double(h.duration_s) << "\n";
  os << "# bin_width_ps=" << format_double(h.bin_width_ps) << "\n";
  os << "# origin_ps=" << format_double(h.origin_ps) << "\n";
  os << "# tau_c_ps=" << format_double(file.tau_c_ps) << "\n";
  os << "# background_hz_per_bin=" << format_double(file.background_hz_per_bin) << "\n";
  os << "# n_bins=" << h.n_bins() << "\n";
  os << "bin_index,left_edge_ps,counts\n";
  for (int i = 0; i < h.n_bins(); ++i) {
    os << i << ',' << format_double(h.left_edge_ps(i)) << ','
       << format_double(h.counts[static_cast<std::size_t>(i)]) << "\n";
  }
  return os.str();
}

std::string histogram_to_json(const HistogramFile& file) {
  const Histogram& h = file.histogram;
  json root;
  root["format"] = "cavspdc-histogram";
  root["version"] = 1;
  root["config_hash"] = file.config_hash;
  if (file.seed)
    root["seed"] = *file.seed;
  else
    root["seed"] = nullptr;
  root["basis"] = file.basis;
  root["duration_s"] = h.duration_s;
  root["bin_width_ps"] = h.bin_width_ps;
  root["origin_ps"] = h.origin_ps;
  root["tau_c_ps"] = file.tau_c_ps;
  root["background_hz_per_bin"] = file.background_hz_per_bin;
  root["counts"] = h.counts;
  return root.dump(2) + "\n";
}

namespace {

HistogramFile parse_histogram_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "# cavspdc histogram v1")
    throw Error(ErrorCode::Config, "histogram file: missing 'cavspdc histogram v1' header");

  HistogramFile file;
  int n_bins = -1;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) != 0) break;
    const std::string body = line.substr(2);
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config, "histogram file: malformed header line '" + line + "'");
    const std::string key = body.substr(0, eq);
    const std::string value = body.substr(eq + 1);
    if (key == "config_hash") file.config_hash = value;
    else if (key == "seed") {
      if (value == "none") file.seed.reset();
      else file.seed = std::stoull(value);
    } else if (key == "basis") file.basis = value;
    else if (key == "duration_s") file.histogram.duration_s = parse_double_field(value, key);
    else if (key == "bin_width_ps") file.histogram.bin_width_ps = parse_double_field(value, key);
    else if (key == "origin_ps") file.histogram.origin_ps = parse_double_field(value, key);
    else if (key == "tau_c_ps") file.tau_c_ps = parse_double_field(value, key);
    else if (key == "background_hz_per_bin")
      file.background_hz_per_bin = parse_double_field(value, key);
    else if (key == "n_bins") n_bins = static_cast<int>(parse_double_field(value, key));
    else throw Error(ErrorCode::Config, "histogram file: unknown header key '" + key + "'");
  }
  if (n_bins < 1)
    throw Error(ErrorCode::Config, "histogram file: missing or invalid n_bins header");
  if (line != "bin_index,left_edge_ps,counts")
    throw Error(ErrorCode::Config, "histogram file: missing column header row");

  file.histogram.counts.reserve(static_cast<std::size_t>(n_bins));
  int expected_index = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string index_text, edge_text, counts_text;
    if (!std::getline(row, index_text, ',') || !std::getline(row, edge_text, ',') ||
        !std::getline(row, counts_text))
      throw Error(ErrorCode::Config, "histogram file: truncated row '" + line + "'");
    const int index = static_cast<int>(parse_double_field(index_text, "bin_index"));
    if (index != expected_index)
      throw Error(ErrorCode::Config, "histogram file: bin indices out of order");
    file.histogram.counts.push_back(parse_double_field(counts_text, "counts"));
    ++expected_index;
  }
  if (expected_index != n_bins)
    throw Error(ErrorCode::Config,
                "histogram file: truncated, expected " + std::to_string(n_bins) +
                    " rows, found " + std::to_string(expected_index));
  return file;
}

HistogramFile parse_histogram_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("histogram file is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || root.value("format", "") != "cavspdc-histogram")
    throw Error(ErrorCode::Config, "histogram file: missing cavspdc-histogram format tag");

  HistogramFile file;
  file.config_hash = root.value("config_hash", "");
  if (root.contains("seed") && !root.at("seed").is_null())
    file.seed = root.at("seed").get<std::uint64_t>();
  file.basis = root.value("basis", "hv");
  file.histogram.duration_s = root.value("duration_s", 0.0);
  file.histogram.bin_width_ps = root.value("bin_width_ps", 0.0);
  file.histogram.origin_ps = root.value("origin_ps", 0.0);
  file.tau_c_ps = root.value("tau_c_ps", 0.0);
  file.background_hz_per_bin = root.value("background_hz_per_bin", 0.0);
  if (!root.contains("counts") || !root.at("counts").is_array())
    throw Error(ErrorCode::Config, "histogram file: missing counts array");
  file.histogram.counts = root.at("counts").get<std::vector<double>>();
  if (file.histogram.counts.empty())
    throw Error(ErrorCode::Config, "histogram file: empty counts array");
  return file;
}

}  // namespace

HistogramFile parse_histogram(const std::string& text) {
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') continue;
    return c == '{' ? parse_histogram_json(text) : parse_histogram_csv(text);
  }
  throw Error(ErrorCode::Config, "histogram file is empty");
}

void write_histogram(const HistogramFile& file, const std::string& path) {
  const bool as_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  write_text_file(path, as_json ? histogram_to_json(file) : histogram_to_csv(file));
}

HistogramFile read_histogram(const std::string& path) {
  return parse_histogram(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failure on '" + path + "'");
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failure on '" + path + "'");
}

std::string analysis_report_json(const est::AnalysisResult& result,
                                 const HistogramFile& hv, const HistogramFile& pm45,
                                 const est::AnalysisOptions& options) {
  json curve = json::array();
  for (const RatioEntry& e : result.curve.entries)
    curve.push_back({{"m", e.m}, {"ratio", e.ratio}, {"sigma", e.sigma}});

  json root;
  root["fit"] = fit_to_json(result.fit);
  root["ratio_curve"] = curve;
  root["visibility"] = {
      {"ratio_total", result.visibility.ratio_total},
      {"ratio_sigma", result.visibility.ratio_sigma},
      {"visibility", result.visibility.visibility},
      {"visibility_sigma", result.visibility.visibility_sigma},
      {"uncorrected_ratio_total", result.uncorrected_ratio_total},
  };
  root["window"] = {
      {"m_half_window", options.m_half_window},
      {"window_ps", options.window_ps},
      {"min_hv_counts", options.min_hv_counts},
      {"t_2pi_celsius", options.t_2pi_celsius},
  };
  root["inputs"] = {
      {"hv",
       {{"config_hash", hv.config_hash},
        {"duration_s", hv.histogram.duration_s},
        {"seed", hv.seed ? json(*hv.seed) : json(nullptr)}}},
      {"pm45",
       {{"config_hash", pm45.config_hash},
        {"duration_s", pm45.histogram.duration_s},
        {"seed", pm45.seed ? json(*pm45.seed) : json(nullptr)}}},
  };
  return root.dump(2) + "\n";
}

SpectralReport make_spectral_report(const ExperimentConfig& config,
                                    double coincidence_rate_per_s_per_mw,
                                    spectral::Envelope envelope,
                                    spectral::BandwidthConvention convention) {
  SpectralReport report;
  report.fsr_ghz = config.cavity.fsr_ghz;
  report.finesse = config.cavity.finesse;
  report.pm_bandwidth_ghz = config.crystal.pm_bandwidth_ghz;
  report.coincidence_rate_per_s_per_mw = coincidence_rate_per_s_per_mw;
  report.envelope = envelope;
  report.convention = convention;
  report.line_fwhm_mhz = spectral::line_fwhm_mhz(report.fsr_ghz, report.finesse);
  report.central_fraction =
      spectral::central_fraction(report.fsr_ghz, report.pm_bandwidth_ghz, envelope, convention);
  report.brightness = spectral::brightness(coincidence_rate_per_s_per_mw,
                                           report.central_fraction, report.line_fwhm_mhz);
  return report;
}

std::string spectral_report_json(const SpectralReport& report) {
  json root;
  root["fsr_ghz"] = report.fsr_ghz;
  root["finesse"] = report.finesse;
  root["pm_bandwidth_ghz"] = report.pm_bandwidth_ghz;
  root["line_fwhm_mhz"] = report.line_fwhm_mhz;
  root["central_fraction"] = report.central_fraction;
  root["inverse_central_fraction"] = 1.0 / report.central_fraction;
  root["coincidence_rate_per_s_per_mw"] = report.coincidence_rate_per_s_per_mw;
  root["brightness_pairs_per_s_mw_mhz"] = report.brightness;
  root["envelope"] = report.envelope == spectral::Envelope::Sinc2 ? "sinc2" : "gaussian";
  root["bandwidth_convention"] =
      report.convention == spectral::BandwidthConvention::Fwhm ? "fwhm" : "first_null";
  return root.dump(2) + "\n";
}

}  // namespace cavspdc::io
