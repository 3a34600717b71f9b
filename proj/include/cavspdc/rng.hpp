#pragma once

#include <array>
#include <cstdint>

namespace cavspdc::rng {

/// Philox4x32-10 counter-based generator. A (key, counter) pair maps to a
/// 128-bit block through a fixed bijection, so any substream is addressable
/// without sequential state.
struct Philox4x32 {
  using Block = std::array<std::uint32_t, 4>;

  static Block generate(std::uint64_t key, std::uint64_t counter_lo,
                        std::uint64_t counter_hi);
};

/// Sequential view over one Philox substream. Streams with distinct
/// (seed, stream) pairs are independent; the draw sequence depends only on
/// those two values, never on scheduling.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform on (0, 1]; safe under log().
  double uniform_pos();

  /// Standard normal via Box-Muller; the partner draw is cached.
  double normal();

  /// Number of failures before the first success, P(n) = p*(1-p)^n.
  std::uint64_t geometric(double success_prob);

  /// Poisson with the given mean (inversion below 10, PTRD above).
  std::uint64_t poisson(double mean);

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Block block_{};
  int word_pos_ = 4;  // forces a refill on first use
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;

  std::uint64_t poisson_small(double mean);
  std::uint64_t poisson_ptrd(double mean);
};

}  // namespace cavspdc::rng
