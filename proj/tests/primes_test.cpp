// Copyright 2026 The nlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "nlab/primes.hpp"
#include "nlab/sieve_cache.hpp"
#include "oracles.hpp"

namespace {

using nlab::build_tables;
using nlab::PrimeTables;

TEST(BuildTables, SmallLimitsMatchTrialDivision) {
  const auto t = build_tables(10);
  ASSERT_EQ(t.prime_count(), 4u);
  std::vector<std::uint64_t> expected;
  for (std::uint64_t n = 0; n <= 10; ++n)
    if (oracle::is_prime_trial(n)) expected.push_back(n);
  EXPECT_EQ(std::vector<std::uint64_t>(t.primes().begin(), t.primes().end()), expected);
  EXPECT_EQ(t.pi_of(10), 4u);

  const auto two = build_tables(2);
  ASSERT_EQ(two.prime_count(), 1u);
  EXPECT_EQ(two.nth_prime(1), 2u);
  EXPECT_EQ(two.pi_of(2), 1u);
}

TEST(BuildTables, RejectsTinyLimit) {
  EXPECT_THROW(build_tables(1), nlab::UsageError);
  EXPECT_THROW(build_tables(0), nlab::UsageError);
  EXPECT_THROW(build_tables(100, {.segment_size = 100}), nlab::UsageError);
}

TEST(BuildTables, PiAtTenMillion) {
  // Independent one-pass sieve first, then the segmented build.
  const auto ref = oracle::reference_sieve(10'000'000);
  const std::uint64_t oracle_pi = oracle::count_primes(ref, 10'000'000);
  ASSERT_EQ(oracle_pi, 664579u);
  const auto t = build_tables(10'000'000);
  EXPECT_EQ(t.pi_of(10'000'000), 664579u);
}

TEST(BuildTables, SegmentedAndThreadedMatchReference) {
  for (std::uint64_t limit : {2u, 3u, 63u, 64u, 65u, 4095u, 4096u, 4097u, 99'991u, 100'000u}) {
    const auto ref = oracle::reference_sieve(limit);
    for (std::uint64_t seg : {64u, 192u, 4096u, 1u << 20}) {
      for (unsigned threads : {1u, 3u}) {
        const auto t = build_tables(limit, {.segment_size = seg, .threads = threads});
        for (std::uint64_t i = 0; i <= limit; ++i)
          ASSERT_EQ(t.is_prime(i), ref[i]) << "limit=" << limit << " seg=" << seg << " i=" << i;
      }
    }
  }
}

TEST(BuildTables, PiMatchesPopcountEverywhere) {
  const auto t = build_tables(50'000);
  const auto ref = oracle::reference_sieve(50'000);
  std::uint64_t running = 0;
  for (std::uint64_t x = 0; x <= 50'000; ++x) {
    running += ref[x];
    ASSERT_EQ(t.pi_of(x), running) << x;
  }
}

TEST(Queries, PiExamples) {
  const auto t = build_tables(1000);
  EXPECT_EQ(t.pi_of(0), 0u);
  EXPECT_EQ(t.pi_of(1), 0u);
  std::uint64_t by_trial = 0;
  for (std::uint64_t n = 0; n <= 13; ++n) by_trial += oracle::is_prime_trial(n);
  EXPECT_EQ(by_trial, 6u);
  EXPECT_EQ(t.pi_of(13), 6u);
  EXPECT_THROW(t.pi_of(1001), nlab::OutOfRangeError);
}

TEST(Queries, NthPrimeAndGap) {
  const auto t = build_tables(100);
  EXPECT_EQ(t.nth_prime(1), 2u);
  EXPECT_EQ(t.nth_prime(4), 7u);
  EXPECT_EQ(t.nth_prime(25), 97u);
  EXPECT_THROW(t.nth_prime(26), nlab::OutOfRangeError);
  EXPECT_THROW(t.nth_prime(0), nlab::OutOfRangeError);

  EXPECT_EQ(t.gap(1), 1u);
  EXPECT_EQ(t.gap(2), 2u);
  EXPECT_EQ(t.gap(4), 4u);
  // p_26 = 101 is not sieved.
  EXPECT_THROW(t.gap(25), nlab::OutOfRangeError);
}

TEST(Queries, InvariantsOverWholeTable) {
  const auto t = build_tables(200'000);
  const auto primes = t.primes();
  EXPECT_EQ(primes[0], 2u);
  EXPECT_EQ(primes[1], 3u);
  std::uint64_t telescoped = t.nth_prime(1);
  for (std::uint64_t m = 1; m <= t.prime_count(); ++m) {
    ASSERT_EQ(t.pi_of(t.nth_prime(m)), m);
    if (m > 1) {
      ASSERT_GT(primes[m - 1], primes[m - 2]);
      telescoped += t.gap(m - 1);
      ASSERT_EQ(telescoped, t.nth_prime(m));
    }
    if (m < t.prime_count()) {
      ASSERT_GE(t.gap(m), 1u);
      if (m >= 2) ASSERT_EQ(t.gap(m) % 2, 0u);
    }
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t x = 2 + rng() % (t.largest_prime() - 2);
    const auto k = t.pi_of(x);
    ASSERT_LE(t.nth_prime(k), x);
    ASSERT_LT(x, t.nth_prime(k + 1));
  }
}

TEST(Cramer, TinyTableRatios) {
  const auto t = build_tables(10);
  const auto stats = nlab::cramer_stats(t, 1, true);
  ASSERT_EQ(stats.ratio_series.size(), 3u);
  const double l2 = std::log(2.0), l3 = std::log(3.0), l5 = std::log(5.0);
  EXPECT_DOUBLE_EQ(stats.ratio_series[0].ratio, 1.0 / (l2 * l2));
  EXPECT_DOUBLE_EQ(stats.ratio_series[1].ratio, 2.0 / (l3 * l3));
  EXPECT_DOUBLE_EQ(stats.ratio_series[2].ratio, 2.0 / (l5 * l5));
  EXPECT_EQ(stats.argmax_m, 1u);
}

TEST(Cramer, RestrictedScanFindsSeven) {
  const auto t = build_tables(100);
  const auto stats = nlab::cramer_stats(t, 4);
  EXPECT_EQ(stats.argmax_m, 4u);
  const double l7 = std::log(7.0);
  EXPECT_DOUBLE_EQ(stats.max_ratio, 4.0 / (l7 * l7));
  EXPECT_NEAR(stats.max_ratio, 1.0563, 1e-4);
}

TEST(Cramer, MillionAttainedAtFirstGap) {
  const auto t = build_tables(1'000'000);
  const auto stats = nlab::cramer_stats(t, 1, true);
  // Exhaustive scan over the series.
  double best = 0;
  std::uint64_t arg = 0;
  for (const auto& r : stats.ratio_series) {
    ASSERT_LE(r.ratio, stats.max_ratio);
    if (r.ratio > best) best = r.ratio, arg = r.m;
  }
  EXPECT_EQ(arg, 1u);
  EXPECT_EQ(stats.argmax_m, 1u);
  const double l2 = std::log(2.0);
  EXPECT_NEAR(stats.max_ratio, 1.0 / (l2 * l2), 1e-12);
  EXPECT_NEAR(stats.max_ratio, 2.0814, 1e-4);
  EXPECT_THROW(nlab::cramer_stats(build_tables(2)), nlab::UsageError);
}

TEST(Dusart, HoldsOnSampleRanges) {
  const auto t = build_tables(1'000'000);
  EXPECT_TRUE(nlab::dusart_check(t, 100'000, 1'000'000).empty());
  EXPECT_TRUE(nlab::dusart_check(t, 60'184, 70'000).empty());
  EXPECT_THROW(nlab::dusart_check(t, 2, 1'000'001), nlab::OutOfRangeError);
  EXPECT_THROW(nlab::dusart_check(t, 1, 10), nlab::UsageError);
}

TEST(Dusart, ThresholdsAreSharp) {
  // Both bounds hold from their thresholds on and fail just below them.
  const auto t = build_tables(200'000);
  EXPECT_TRUE(nlab::dusart_check(t, 2, 200'000).empty());
  const auto ref = oracle::reference_sieve(60'184);
  auto pi = [&](std::uint64_t x) { return static_cast<double>(oracle::count_primes(ref, x)); };
  EXPECT_LT(pi(5392), 5392.0 / (std::log(5392.0) - 1.0));
  EXPECT_GE(pi(5393), 5393.0 / (std::log(5393.0) - 1.0));
  EXPECT_GT(pi(60183), 60183.0 / (std::log(60183.0) - 1.1));
  EXPECT_LE(pi(60184), 60184.0 / (std::log(60184.0) - 1.1));
}

TEST(SieveCache, RoundTripAndLayout) {
  const auto dir = std::filesystem::temp_directory_path() / "nlab_cache_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "s.nlab";
  const auto t = build_tables(12'345);
  nlab::save_cache(t, path);
  EXPECT_EQ(std::filesystem::file_size(path), 5u + 8u + (12'345u + 1 + 7) / 8);

  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(std::string(raw.begin(), raw.begin() + 5), "NLAB1");
  std::uint64_t limit = 0;
  for (int i = 0; i < 8; ++i) limit |= std::uint64_t{raw[5 + i]} << (8 * i);
  EXPECT_EQ(limit, 12'345u);
  // byte 0 covers 0..7: primes 2, 3, 5, 7 -> bits 2, 3, 5, 7
  EXPECT_EQ(raw[13], 0b10101100);

  const auto loaded = nlab::load_cache(path);
  EXPECT_EQ(loaded.limit(), t.limit());
  EXPECT_TRUE(std::equal(loaded.words().begin(), loaded.words().end(), t.words().begin()));
  EXPECT_EQ(loaded.pi_of(12'345), t.pi_of(12'345));
  std::filesystem::remove_all(dir);
}

TEST(SieveCache, RejectsCorruption) {
  const auto dir = std::filesystem::temp_directory_path() / "nlab_cache_bad";
  std::filesystem::create_directories(dir);
  const auto path = dir / "s.nlab";
  nlab::save_cache(build_tables(20'000), path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(13 + 1);  // bits 8..15
    f.put(static_cast<char>(0xFF));
  }
  EXPECT_THROW(nlab::load_cache(path), nlab::CacheError);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
  }
  EXPECT_THROW(nlab::load_cache(path), nlab::CacheError);
  EXPECT_THROW(nlab::load_cache(dir / "missing"), nlab::CacheError);
  std::filesystem::remove_all(dir);
}

}  // namespace
