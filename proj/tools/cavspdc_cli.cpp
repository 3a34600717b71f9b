// cavspdc command-line front end. Talks to the core exclusively through the
// C API, so it doubles as a smoke test of the shared-library surface.
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cavspdc/cavspdc.h"

namespace {

// exit codes: 0 success, 2 usage/config, 3 i/o, 4 numerical failure
int exit_code_for(cavspdc_status status) {
  switch (status) {
    case CAVSPDC_OK: return 0;
    case CAVSPDC_ERR_INVALID_ARGUMENT:
    case CAVSPDC_ERR_CONFIG:
    case CAVSPDC_ERR_CAPACITY: return 2;
    case CAVSPDC_ERR_IO: return 3;
    case CAVSPDC_ERR_NUMERIC:
    case CAVSPDC_ERR_INTERNAL: return 4;
  }
  return 4;
}

int report_failure(const char* verb, cavspdc_status status) {
  std::fprintf(stderr, "cavspdc %s: %s\n", verb, cavspdc_last_error());
  return exit_code_for(status);
}

struct ConfigHandle {
  cavspdc_config_t* ptr = nullptr;
  ~ConfigHandle() { cavspdc_config_free(ptr); }
};

struct HistogramHandle {
  cavspdc_histogram_t* ptr = nullptr;
  ~HistogramHandle() { cavspdc_histogram_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { cavspdc_string_free(ptr); }
};

int load_config_arg(const std::string& path, ConfigHandle& config) {
  const cavspdc_status status = path.empty()
                                    ? cavspdc_config_default(&config.ptr)
                                    : cavspdc_config_load(path.c_str(), &config.ptr);
  if (status != CAVSPDC_OK) return report_failure("config", status);
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& basis,
                 std::uint64_t seed, bool seed_given, double duration,
                 const std::string& out_path) {
  ConfigHandle config;
  if (int rc = load_config_arg(config_path, config)) return rc;

  if (!seed_given) seed = cavspdc_config_run_seed(config.ptr);

  HistogramHandle hist;
  cavspdc_status status = cavspdc_simulate(config.ptr, basis.c_str(), seed, duration, &hist.ptr);
  if (status != CAVSPDC_OK) return report_failure("simulate", status);
  status = cavspdc_histogram_write(hist.ptr, out_path.c_str());
  if (status != CAVSPDC_OK) return report_failure("simulate", status);
  std::printf("wrote %s: %zu bins, %.0f counts, seed %llu\n", out_path.c_str(),
              cavspdc_histogram_num_bins(hist.ptr), cavspdc_histogram_total(hist.ptr),
              static_cast<unsigned long long>(seed));
  return 0;
}

int run_expect(const std::string& config_path, const std::string& basis, double duration,
               const std::string& out_path) {
  ConfigHandle config;
  if (int rc = load_config_arg(config_path, config)) return rc;

  HistogramHandle hist;
  cavspdc_status status = cavspdc_expect(config.ptr, basis.c_str(), duration, &hist.ptr);
  if (status != CAVSPDC_OK) return report_failure("expect", status);
  status = cavspdc_histogram_write(hist.ptr, out_path.c_str());
  if (status != CAVSPDC_OK) return report_failure("expect", status);
  std::printf("wrote %s: %zu bins, %.3f expected counts\n", out_path.c_str(),
              cavspdc_histogram_num_bins(hist.ptr), cavspdc_histogram_total(hist.ptr));
  return 0;
}

int run_analyze(const std::string& hv_path, const std::string& pm45_path, double t2pi,
                const std::string& report_path) {
  HistogramHandle hv;
  cavspdc_status status = cavspdc_histogram_read(hv_path.c_str(), &hv.ptr);
  if (status != CAVSPDC_OK) return report_failure("analyze", status);
  HistogramHandle pm45;
  status = cavspdc_histogram_read(pm45_path.c_str(), &pm45.ptr);
  if (status != CAVSPDC_OK) return report_failure("analyze", status);

  StringHandle report;
  status = cavspdc_analyze(hv.ptr, pm45.ptr, t2pi, &report.ptr);
  if (status != CAVSPDC_OK) return report_failure("analyze", status);

  if (report_path.empty()) {
    std::fputs(report.ptr, stdout);
    return 0;
  }
  FILE* out = std::fopen(report_path.c_str(), "wb");
  if (out == nullptr) {
    std::fprintf(stderr, "cavspdc analyze: cannot open '%s' for writing\n",
                 report_path.c_str());
    return 3;
  }
  std::fputs(report.ptr, out);
  std::fclose(out);
  std::printf("wrote %s\n", report_path.c_str());
  return 0;
}

int run_spectral(const std::string& config_path, double rate, const std::string& out_path) {
  ConfigHandle config;
  if (int rc = load_config_arg(config_path, config)) return rc;

  StringHandle report;
  const cavspdc_status status = cavspdc_spectral(config.ptr, rate, &report.ptr);
  if (status != CAVSPDC_OK) return report_failure("spectral", status);
  if (out_path.empty()) {
    std::fputs(report.ptr, stdout);
    return 0;
  }
  FILE* out = std::fopen(out_path.c_str(), "wb");
  if (out == nullptr) {
    std::fprintf(stderr, "cavspdc spectral: cannot open '%s' for writing\n", out_path.c_str());
    return 3;
  }
  std::fputs(report.ptr, out);
  std::fclose(out);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity-enhanced SPDC time-bin simulator and birefringence estimator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cavspdc_version());

  std::string config_path;
  std::string basis = "hv";
  std::uint64_t seed = 1;
  double duration = 0.0;  // 0 = use the configured run duration
  std::string out_path;
  std::string hv_path, pm45_path, report_path;
  double t2pi = 4.5;
  double rate = 4000.0;

  CLI::App* simulate = app.add_subcommand("simulate", "run the event-level Monte Carlo");
  simulate->add_option("config", config_path, "configuration JSON (defaults when omitted)");
  simulate->add_option("--basis", basis, "measurement basis")
      ->check(CLI::IsMember({"hv", "pm45"}))
      ->capture_default_str();
  CLI::Option* seed_opt = simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("--duration", duration, "measurement duration in seconds");
  simulate->add_option("--out", out_path, "output histogram path (.csv or .json)")
      ->required();

  CLI::App* expect = app.add_subcommand("expect", "write the analytic expected histogram");
  expect->add_option("config", config_path, "configuration JSON (defaults when omitted)");
  expect->add_option("--basis", basis, "measurement basis")
      ->check(CLI::IsMember({"hv", "pm45"}))
      ->capture_default_str();
  expect->add_option("--duration", duration, "measurement duration in seconds");
  expect->add_option("--out", out_path, "output histogram path (.csv or .json)")->required();

  CLI::App* analyze = app.add_subcommand("analyze", "fit the birefringence phase from a histogram pair");
  analyze->add_option("hv", hv_path, "H-V basis histogram")->required();
  analyze->add_option("pm45", pm45_path, "+-45 basis histogram")->required();
  analyze->add_option("--t2pi", t2pi, "ICC temperature for a 2*pi phase, in C")
      ->capture_default_str();
  analyze->add_option("--report", report_path, "report path (stdout when omitted)");

  CLI::App* spectral = app.add_subcommand("spectral", "line width, central fraction and brightness");
  spectral->add_option("config", config_path, "configuration JSON (defaults when omitted)");
  spectral->add_option("--rate", rate,
                       "coincidence rate between the beam-splitter sides, pairs/(s mW)")
      ->capture_default_str();
  spectral->add_option("--out", out_path, "report path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (simulate->parsed()) {
    const bool explicit_duration = simulate->count("--duration") > 0;
    if (explicit_duration && duration <= 0.0) {
      std::fprintf(stderr, "cavspdc simulate: --duration must be > 0\n");
      return 2;
    }
    return run_simulate(config_path, basis, seed, seed_opt->count() > 0, duration, out_path);
  }
  if (expect->parsed()) {
    if (expect->count("--duration") > 0 && duration <= 0.0) {
      std::fprintf(stderr, "cavspdc expect: --duration must be > 0\n");
      return 2;
    }
    return run_expect(config_path, basis, duration, out_path);
  }
  if (analyze->parsed()) return run_analyze(hv_path, pm45_path, t2pi, report_path);
  if (spectral->parsed()) return run_spectral(config_path, rate, out_path);
  return 2;
}
