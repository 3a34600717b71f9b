#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "cavspdc/rng.hpp"
#include "cavspdc/stats.hpp"

using namespace cavspdc;
using doctest::Approx;

TEST_CASE("philox4x32-10 reference vectors") {
  // Known-answer vectors for the 10-round Philox4x32 function.
  const auto zero = rng::Philox4x32::generate(0, 0, 0);
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const auto ones = rng::Philox4x32::generate(0xffffffffffffffffull, 0xffffffffffffffffull,
                                              0xffffffffffffffffull);
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  const auto pi_digits = rng::Philox4x32::generate(
      0x299f31d0a4093822ull, 0x85a308d3243f6a88ull, 0x0370734413198a2eull);
  CHECK(pi_digits[0] == 0xd16cfe09u);
  CHECK(pi_digits[1] == 0x94fdccebu);
  CHECK(pi_digits[2] == 0x5001e420u);
  CHECK(pi_digits[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and independent") {
  rng::RngStream a(42, 7);
  rng::RngStream b(42, 7);
  rng::RngStream c(42, 8);
  bool any_different = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) any_different = true;
  }
  CHECK(any_different);
}

TEST_CASE("uniform range and moments") {
  rng::RngStream rng(123, 0);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(sum / n == Approx(0.5).epsilon(0.005));
  CHECK(sum_sq / n == Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("normal moments") {
  rng::RngStream rng(99, 1);
  const int n = 400000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  CHECK(s1 / n == Approx(0.0).epsilon(0.01).scale(1.0));
  CHECK(s2 / n == Approx(1.0).epsilon(0.01));
  CHECK(std::abs(s3 / n) < 0.02);
  CHECK(s4 / n == Approx(3.0).epsilon(0.05));
}

TEST_CASE("geometric matches the exit law") {
  // success probability 0.11: the detected-roundtrip distribution at s = 0.89
  rng::RngStream rng(7, 3);
  const double p = 0.11;
  const int n = 500000;
  std::map<std::uint64_t, int> histogram;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.geometric(p);
    ++histogram[k];
    mean += static_cast<double>(k);
  }
  mean /= n;
  CHECK(mean == Approx(0.89 / 0.11).epsilon(0.02));  // E[n | exit] = s/(1-s)
  // frequency ratio P(0)/P(1) = 1/s
  CHECK(static_cast<double>(histogram[0]) / histogram[1] == Approx(1.0 / 0.89).epsilon(0.03));

  // chi^2 against the exact pmf over the first 40 values
  double chi2 = 0.0;
  int dof = 0;
  for (int k = 0; k < 40; ++k) {
    const double expected = n * p * std::pow(1.0 - p, k);
    if (expected < 10.0) break;
    const double observed = histogram.count(k) ? histogram[k] : 0.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
    ++dof;
  }
  CHECK(stats::chi2_sf(chi2, dof) > 1e-4);
}

TEST_CASE("geometric with certain success") {
  rng::RngStream rng(1, 1);
  for (int i = 0; i < 16; ++i) CHECK(rng.geometric(1.0) == 0);
}

TEST_CASE("poisson small and large means") {
  for (double mean : {0.5, 3.0, 13.44, 40.0, 400.0}) {
    rng::RngStream rng(2024, static_cast<std::uint64_t>(mean * 100));
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    std::map<std::uint64_t, int> histogram;
    for (int i = 0; i < n; ++i) {
      const auto k = rng.poisson(mean);
      sum += static_cast<double>(k);
      sum_sq += static_cast<double>(k) * static_cast<double>(k);
      ++histogram[k];
    }
    const double sample_mean = sum / n;
    const double sample_var = sum_sq / n - sample_mean * sample_mean;
    CHECK(sample_mean == Approx(mean).epsilon(0.02));
    CHECK(sample_var == Approx(mean).epsilon(0.05));

    // chi^2 against the exact pmf wherever expected counts are healthy
    double chi2 = 0.0;
    int dof = 0;
    const int lo = static_cast<int>(std::max(0.0, mean - 6.0 * std::sqrt(mean)));
    const int hi = static_cast<int>(mean + 6.0 * std::sqrt(mean) + 4.0);
    for (int k = lo; k <= hi; ++k) {
      const double log_pmf = -mean + k * std::log(mean) - stats::log_factorial(k);
      const double expected = n * std::exp(log_pmf);
      if (expected < 10.0) continue;
      const double observed =
          histogram.count(static_cast<std::uint64_t>(k)) ? histogram[k] : 0.0;
      chi2 += (observed - expected) * (observed - expected) / expected;
      ++dof;
    }
    REQUIRE(dof > 3);
    CHECK(stats::chi2_sf(chi2, dof) > 1e-4);
  }
}

TEST_CASE("poisson degenerate mean") {
  rng::RngStream rng(5, 5);
  CHECK(rng.poisson(0.0) == 0);
}
