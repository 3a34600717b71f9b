#include "cavspdc/rng.hpp"

#include <cmath>
#include <numbers>

#include "cavspdc/error.hpp"
#include "cavspdc/stats.hpp"

namespace cavspdc::rng {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t c1 = c[1];
  const std::uint32_t c3 = c[3];
  c[0] = hi1 ^ c1 ^ k0;
  c[1] = lo1;
  c[2] = hi0 ^ c3 ^ k1;
  c[3] = lo0;
}

}  // namespace

Philox4x32::Block Philox4x32::generate(std::uint64_t key, std::uint64_t counter_lo,
                                       std::uint64_t counter_hi) {
  std::uint32_t c[4] = {
      static_cast<std::uint32_t>(counter_lo),
      static_cast<std::uint32_t>(counter_lo >> 32),
      static_cast<std::uint32_t>(counter_hi),
      static_cast<std::uint32_t>(counter_hi >> 32),
  };
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c[0], c[1], c[2], c[3]};
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

std::uint64_t RngStream::next_u64() {
  if (word_pos_ >= 4) {
    block_ = Philox4x32::generate(seed_, block_index_++, stream_);
    word_pos_ = 0;
  }
  const std::uint64_t lo = block_[word_pos_];
  const std::uint64_t hi = block_[word_pos_ + 1];
  word_pos_ += 2;
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_pos()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::geometric(double success_prob) {
  if (!(success_prob > 0.0 && success_prob <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "geometric: success probability must lie in (0,1]");
  if (success_prob == 1.0) return 0;
  const double log_failure = std::log1p(-success_prob);
  const double draws = std::floor(std::log(uniform_pos()) / log_failure);
  return static_cast<std::uint64_t>(draws);
}

std::uint64_t RngStream::poisson(double mean) {
  if (mean < 0.0)
    throw Error(ErrorCode::InvalidArgument, "poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  return mean < 10.0 ? poisson_small(mean) : poisson_ptrd(mean);
}

std::uint64_t RngStream::poisson_small(double mean) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double product = uniform_pos();
  while (product > limit) {
    ++k;
    product *= uniform_pos();
  }
  return k;
}

// Hoermann's transformed rejection with squeeze (PTRS), exact for mean >= 10.
std::uint64_t RngStream::poisson_ptrd(double mean) {
  const double smu = std::sqrt(mean);
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - stats::log_factorial(static_cast<std::uint64_t>(k))) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace cavspdc::rng
