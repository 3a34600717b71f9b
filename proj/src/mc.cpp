#include "cavspdc/mc.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include "cavspdc/error.hpp"

namespace cavspdc::mc {

namespace {

constexpr std::uint64_t kBatchSize = 1u << 16;
// Reserved substreams; batches use 0 .. n_batches-1.
constexpr std::uint64_t kStreamPairCount = ~0ull;
constexpr std::uint64_t kStreamBackground = ~0ull - 1;

constexpr double kFwhmToSigma = 2.3548200450309493;
constexpr int kCosTableHalf = 1024;

}  // namespace

SimRun SimRun::from_config(const ExperimentConfig& config) {
  return {config, config.run.seed, config.run.duration_s, config.run.n_workers};
}

std::optional<std::uint64_t> sample_roundtrips(rng::RngStream& rng, double transmission,
                                               double loss) {
  if (!(transmission > 0.0) || loss < 0.0 || transmission + loss > 1.0)
    throw Error(ErrorCode::InvalidArgument,
                "sample_roundtrips: need transmission > 0 and transmission + loss <= 1");
  const double exit_or_lost = transmission + loss;
  std::uint64_t n = 0;
  for (;;) {
    const double u = rng.uniform();
    if (u < transmission) return n;
    if (u < exit_or_lost) return std::nullopt;
    ++n;
  }
}

std::uint64_t sample_roundtrips_detected(rng::RngStream& rng, double survival) {
  if (!(survival >= 0.0 && survival < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "sample_roundtrips_detected: survival must lie in [0,1)");
  return rng.geometric(1.0 - survival);
}

Outcome sample_outcome(rng::RngStream& rng, int m, const OutcomeModel& model,
                       bool is_backward) {
  if (rng.uniform() >= 0.5) return Outcome::None;
  const bool role = is_backward ? !model.forward_interferes : model.forward_interferes;
  const bool interferes =
      role && (model.compensation_fraction >= 1.0 ||
               rng.uniform() < model.compensation_fraction);
  const double prob = interferes ? model.interfering_probability(m)
                                 : model.mixture_probability();
  return rng.uniform() < prob ? Outcome::CoincidenceTtTr : Outcome::None;
}

Outcome sample_outcome(rng::RngStream& rng, int m, double phase_rad, double theta_t_rad,
                       double theta_r_rad, EccOrientation ecc, bool is_backward,
                       double compensation_fraction) {
  (void)theta_r_rad;
  OutcomeModel model;
  model.phase_rad = phase_rad;
  model.analyzer_angle_rad = 2.0 * theta_t_rad;
  model.compensation_fraction = compensation_fraction;
  model.forward_interferes = ecc == EccOrientation::Normal;
  model.refresh_cache();
  return sample_outcome(rng, m, model, is_backward);
}

EventSampler::EventSampler(const ExperimentConfig& config,
                           const MeasurementConfig& measurement) {
  transmission_ = config.cavity.output_coupler_transmission;
  loss_ = config.cavity.intracavity_loss_per_roundtrip;
  survival_ = config.cavity.survival();
  exit_prob_ = 1.0 - survival_;
  explicit_loss_ = config.run.explicit_loss;
  beta_ = config.pump.backward_pair_fraction();
  compensation_ = config.crystal.compensation_fraction;
  forward_interferes_ = config.crystal.ecc_orientation == EccOrientation::Normal;
  phase_ = config.cavity.birefringence_phase_rad;

  OutcomeModel model = OutcomeModel::from_config(config, measurement);
  c4_ = model.c4;
  q_ = model.q;

  tau_c_ = config.cavity.roundtrip_time_ps;
  box_half_ = 0.5 * config.crystal.box_width_ps;
  sigma_det_ = config.detector.jitter_fwhm_ps / kFwhmToSigma;
  cos_table_.resize(kCosTableHalf + 1);
  for (int k = 0; k <= kCosTableHalf; ++k)
    cos_table_[static_cast<std::size_t>(k)] = std::cos(k * phase_);
}

double EventSampler::cos_m_phase(int m) const {
  const int k = std::abs(m);
  if (k <= kCosTableHalf) return cos_table_[static_cast<std::size_t>(k)];
  return std::cos(m * phase_);
}

PairEvent EventSampler::sample(rng::RngStream& rng) const {
  PairEvent event;
  if (explicit_loss_) {
    const auto ns = sample_roundtrips(rng, transmission_, loss_);
    const auto ni = sample_roundtrips(rng, transmission_, loss_);
    if (!ns || !ni) {
      event.lost = true;
      return event;
    }
    event.n_signal = static_cast<std::int64_t>(*ns);
    event.n_idler = static_cast<std::int64_t>(*ni);
  } else {
    event.n_signal = static_cast<std::int64_t>(rng.geometric(exit_prob_));
    event.n_idler = static_cast<std::int64_t>(rng.geometric(exit_prob_));
  }
  event.m = static_cast<int>(event.n_signal - event.n_idler);

  event.is_backward = beta_ > 0.0 && rng.uniform() < beta_;
  if (rng.uniform() >= 0.5) return event;  // both photons left the same BS port

  const bool role = event.is_backward ? !forward_interferes_ : forward_interferes_;
  const bool interferes =
      role && (compensation_ >= 1.0 || rng.uniform() < compensation_);
  const double prob =
      interferes ? 0.5 * (c4_ - q_ * cos_m_phase(event.m)) : 0.5 * c4_;
  if (rng.uniform() >= prob) return event;

  event.coincidence = true;
  event.tau_ps = event.m * tau_c_;
  if (box_half_ > 0.0) event.tau_ps += (2.0 * rng.uniform() - 1.0) * box_half_;
  if (sigma_det_ > 0.0) event.tau_ps += (rng.normal() - rng.normal()) * sigma_det_;
  return event;
}

int resolve_workers(int n_workers) {
  if (n_workers > 0) return n_workers;
  if (const char* env = std::getenv("CAVSPDC_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0 && parsed <= 1024) return static_cast<int>(parsed);
  }
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware == 0 ? 1 : static_cast<int>(hardware);
}

namespace {

void run_batch(const EventSampler& sampler, const HistogramGeometry& geometry,
               std::uint64_t seed, std::uint64_t batch_index, std::uint64_t n_pairs,
               std::vector<std::uint64_t>& counts) {
  rng::RngStream rng(seed, batch_index);
  const double origin = geometry.origin_ps;
  const double inv_width = 1.0 / geometry.bin_width_ps;
  const double n_bins = static_cast<double>(geometry.n_bins);

  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const PairEvent event = sampler.sample(rng);
    if (!event.coincidence) continue;
    const double pos = (event.tau_ps - origin) * inv_width;
    if (pos >= 0.0 && pos < n_bins) ++counts[static_cast<std::size_t>(pos)];
  }
}

}  // namespace

Histogram run_simulation(const SimRun& run, const MeasurementConfig& measurement) {
  run.config.validate();
  if (!(run.duration_s > 0.0))
    throw Error(ErrorCode::InvalidArgument, "run_simulation: duration must be > 0");

  const double expected_pairs =
      run.config.detector.pair_detection_rate_hz * run.duration_s;
  if (expected_pairs > 9.0e18)
    throw Error(ErrorCode::Capacity,
                "run_simulation: expected pair count exceeds the 2^63 event budget");

  const EventSampler sampler(run.config, measurement);
  const HistogramGeometry geometry = make_geometry(
      run.config.cavity.roundtrip_time_ps, run.config.detector.bin_width_ps,
      run.config.run.m_span);

  const std::uint64_t n_pairs =
      rng::RngStream(run.seed, kStreamPairCount).poisson(expected_pairs);
  const std::uint64_t n_batches = (n_pairs + kBatchSize - 1) / kBatchSize;

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(geometry.n_bins), 0);
  const int workers = std::max(
      1, std::min<int>(resolve_workers(run.n_workers),
                       static_cast<int>(std::min<std::uint64_t>(n_batches, 1024))));

  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_batches; ++b) {
      const std::uint64_t in_batch = std::min(kBatchSize, n_pairs - b * kBatchSize);
      run_batch(sampler, geometry, run.seed, b, in_batch, counts);
    }
  } else {
    std::atomic<std::uint64_t> next_batch{0};
    std::mutex merge_mutex;
    auto work = [&] {
      std::vector<std::uint64_t> local(counts.size(), 0);
      for (;;) {
        const std::uint64_t b = next_batch.fetch_add(1);
        if (b >= n_batches) break;
        const std::uint64_t in_batch = std::min(kBatchSize, n_pairs - b * kBatchSize);
        run_batch(sampler, geometry, run.seed, b, in_batch, local);
      }
      std::lock_guard<std::mutex> lock(merge_mutex);
      for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // uniform Poisson background, one independent draw per bin
  const double background_mean =
      run.config.detector.background_rate_for(measurement.basis) * run.duration_s;
  if (background_mean > 0.0) {
    rng::RngStream bg(run.seed, kStreamBackground);
    for (std::uint64_t& c : counts) c += bg.poisson(background_mean);
  }

  Histogram hist = Histogram::zeros(geometry, run.duration_s);
  for (std::size_t i = 0; i < counts.size(); ++i)
    hist.counts[i] = static_cast<double>(counts[i]);
  return hist;
}

}  // namespace cavspdc::mc
