#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cavspdc/config.hpp"
#include "cavspdc/histogram.hpp"
#include "cavspdc/polarization.hpp"
#include "cavspdc/rng.hpp"

namespace cavspdc::mc {

struct SimRun {
  ExperimentConfig config;
  std::uint64_t seed = 1;
  double duration_s = 960.0;
  int n_workers = 0;

  static SimRun from_config(const ExperimentConfig& config);
};

/// One generated pair, fully sampled. tau_ps is only drawn (box offset plus
/// two detector jitters) when the pair actually produced a coincidence.
struct PairEvent {
  std::int64_t n_signal = 0;
  std::int64_t n_idler = 0;
  int m = 0;  // n_signal - n_idler
  double tau_ps = 0.0;
  bool coincidence = false;
  bool is_backward = false;
  bool lost = false;  // explicit-loss mode only
};

/// Roundtrips before exit with explicit loss sampling: per roundtrip the
/// photon exits with probability `transmission`, is absorbed with
/// probability `loss`, and survives otherwise. nullopt = lost.
std::optional<std::uint64_t> sample_roundtrips(rng::RngStream& rng, double transmission,
                                               double loss);

/// Roundtrips conditioned on eventual exit: P(n) = (1-s) s^n.
std::uint64_t sample_roundtrips_detected(rng::RngStream& rng, double survival);

enum class Outcome { None, CoincidenceTtTr };

/// One polarization measurement: 50-50 beam-splitter post-selection first
/// (same-port pairs produce no TT-TR coincidence), then the PBS split with
/// the interfering or distinguishable probability as dictated by the ECC
/// orientation and pump direction.
Outcome sample_outcome(rng::RngStream& rng, int m, const OutcomeModel& model,
                       bool is_backward);

/// Wrapper with the explicit parameter list. theta_r only affects the
/// monitor arm and does not enter the TT-TR statistics.
Outcome sample_outcome(rng::RngStream& rng, int m, double phase_rad, double theta_t_rad,
                       double theta_r_rad, EccOrientation ecc, bool is_backward,
                       double compensation_fraction = 1.0);

/// Samples whole pair events for a fixed configuration and basis. The
/// per-event cost matters: analyzer terms and cos(m*phi) are precomputed.
class EventSampler {
public:
  EventSampler(const ExperimentConfig& config, const MeasurementConfig& measurement);

  PairEvent sample(rng::RngStream& rng) const;

  double survival() const { return survival_; }

private:
  double transmission_ = 0.0;
  double loss_ = 0.0;
  double survival_ = 0.0;
  double exit_prob_ = 0.0;  // 1 - survival
  bool explicit_loss_ = false;
  double beta_ = 0.0;
  double compensation_ = 1.0;
  bool forward_interferes_ = true;
  double phase_ = 0.0;
  double c4_ = 1.0;
  double q_ = 0.0;
  double tau_c_ = 0.0;
  double box_half_ = 0.0;
  double sigma_det_ = 0.0;
  std::vector<double> cos_table_;

  double cos_m_phase(int m) const;
};

/// Event-level simulation of one measurement run. Deterministic for a fixed
/// (config, seed): pairs are partitioned into fixed-size batches, each batch
/// draws from its own counter-based substream, and merging is count
/// addition, so the result is independent of the worker count as well.
Histogram run_simulation(const SimRun& run, const MeasurementConfig& measurement);

/// Worker count actually used for a run configuration (CAVSPDC_WORKERS
/// overrides, hardware concurrency otherwise).
int resolve_workers(int n_workers);

}  // namespace cavspdc::mc
