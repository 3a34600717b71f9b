/* cavspdc C API: cavity-enhanced type-II SPDC simulation and birefringence
 * estimation behind opaque handles and status codes. All functions return
 * CAVSPDC_OK on success; on failure the thread-local message from
 * cavspdc_last_error() describes what went wrong. */
#ifndef CAVSPDC_H
#define CAVSPDC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CAVSPDC_API __declspec(dllexport)
#else
#define CAVSPDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cavspdc_status {
  CAVSPDC_OK = 0,
  CAVSPDC_ERR_INVALID_ARGUMENT = 1,
  CAVSPDC_ERR_CONFIG = 2,
  CAVSPDC_ERR_IO = 3,
  CAVSPDC_ERR_NUMERIC = 4,
  CAVSPDC_ERR_CAPACITY = 5,
  CAVSPDC_ERR_INTERNAL = 6
} cavspdc_status;

typedef struct cavspdc_config_t cavspdc_config_t;
typedef struct cavspdc_histogram_t cavspdc_histogram_t;

CAVSPDC_API const char* cavspdc_version(void);

/* Message for the most recent failure on this thread; never NULL. */
CAVSPDC_API const char* cavspdc_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* Reference defaults (826 ps roundtrip, s = 0.89, 38.3 ps bins, ...). */
CAVSPDC_API cavspdc_status cavspdc_config_default(cavspdc_config_t** out);
CAVSPDC_API cavspdc_status cavspdc_config_load(const char* path, cavspdc_config_t** out);
CAVSPDC_API cavspdc_status cavspdc_config_parse(const char* json_text,
                                                cavspdc_config_t** out);

/* Override one field, e.g. ("cavity.birefringence_phase_rad", "3.14159").
 * The value is JSON text. */
CAVSPDC_API cavspdc_status cavspdc_config_set(cavspdc_config_t* config,
                                              const char* dotted_key,
                                              const char* json_value);

/* Pretty JSON rendering; free with cavspdc_string_free. */
CAVSPDC_API cavspdc_status cavspdc_config_to_json(const cavspdc_config_t* config,
                                                  char** out_json);

/* 16-hex-digit hash of the canonical configuration. */
CAVSPDC_API cavspdc_status cavspdc_config_hash_hex(const cavspdc_config_t* config,
                                                   char out_hex[17]);

/* Configured run defaults, for callers that do not override them. */
CAVSPDC_API uint64_t cavspdc_config_run_seed(const cavspdc_config_t* config);
CAVSPDC_API double cavspdc_config_run_duration_s(const cavspdc_config_t* config);

CAVSPDC_API void cavspdc_config_free(cavspdc_config_t* config);

/* ---- simulation and analytic expectation ------------------------------ */

/* basis is "hv", "pm45" or "custom" (custom uses the configured HWP
 * angles). duration_s <= 0 falls back to the configured run duration. */
CAVSPDC_API cavspdc_status cavspdc_simulate(const cavspdc_config_t* config,
                                            const char* basis, uint64_t seed,
                                            double duration_s,
                                            cavspdc_histogram_t** out);

CAVSPDC_API cavspdc_status cavspdc_expect(const cavspdc_config_t* config,
                                          const char* basis, double duration_s,
                                          cavspdc_histogram_t** out);

/* ---- histogram files --------------------------------------------------- */

/* Format chosen by extension: .json writes the JSON mirror, anything else
 * the CSV form. */
CAVSPDC_API cavspdc_status cavspdc_histogram_write(const cavspdc_histogram_t* hist,
                                                   const char* path);
CAVSPDC_API cavspdc_status cavspdc_histogram_read(const char* path,
                                                  cavspdc_histogram_t** out);

CAVSPDC_API size_t cavspdc_histogram_num_bins(const cavspdc_histogram_t* hist);
CAVSPDC_API double cavspdc_histogram_bin_width_ps(const cavspdc_histogram_t* hist);
CAVSPDC_API double cavspdc_histogram_duration_s(const cavspdc_histogram_t* hist);
CAVSPDC_API double cavspdc_histogram_total(const cavspdc_histogram_t* hist);

/* Copies min(n_bins, buffer_len) counts into the buffer and returns the
 * number copied. */
CAVSPDC_API size_t cavspdc_histogram_counts(const cavspdc_histogram_t* hist,
                                            double* buffer, size_t buffer_len);

CAVSPDC_API void cavspdc_histogram_free(cavspdc_histogram_t* hist);

/* ---- analysis ---------------------------------------------------------- */

/* Background correction, per-time-bin peak integration, ratio curve, phase
 * fit and visibility over the central 41 peaks. The two histograms must
 * share bin geometry. Returns the JSON report; free with
 * cavspdc_string_free. t_2pi_celsius <= 0 selects the 4.5 C default. */
CAVSPDC_API cavspdc_status cavspdc_analyze(const cavspdc_histogram_t* hv,
                                           const cavspdc_histogram_t* pm45,
                                           double t_2pi_celsius, char** out_report_json);

/* Cavity line FWHM, central-line fraction and normalized brightness for the
 * configured cavity. rate_per_s_per_mw is the coincidence rate between the
 * two beam-splitter sides per mW of pump; zero is allowed (dark source). */
CAVSPDC_API cavspdc_status cavspdc_spectral(const cavspdc_config_t* config,
                                            double rate_per_s_per_mw,
                                            char** out_report_json);

CAVSPDC_API void cavspdc_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* CAVSPDC_H */
