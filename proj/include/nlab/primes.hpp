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

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nlab/error.hpp"

namespace nlab {

// Dusart-type bounds on pi(x): x/(ln x - 1) <= pi(x) holds from kDusartLowerFrom on,
// pi(x) <= x/(ln x - 1.1) from kDusartUpperFrom on. Both were confirmed against the
// sieve: the last failures are at 5392 and 60183.
inline constexpr std::uint64_t kDusartLowerFrom = 5393;
inline constexpr std::uint64_t kDusartUpperFrom = 60184;

struct SieveOptions {
  // Numbers per segment; must be a positive multiple of 64.
  std::uint64_t segment_size = std::uint64_t{1} << 20;
  unsigned threads = 1;
};

// Primality bitset over [0, limit] with the ordered prime list and a rank
// directory answering pi(x). Immutable once built.
class PrimeTables {
 public:
  static constexpr std::uint64_t kBlockBits = 4096;
  static constexpr std::uint64_t kWordsPerBlock = kBlockBits / 64;
  static constexpr std::uint64_t kMaxLimit = std::numeric_limits<std::uint32_t>::max();

  PrimeTables() = default;

  // Takes ownership of a raw bitset (bit i set iff i is prime) and derives
  // the prime list and rank directory. Bits above `limit` are ignored.
  static PrimeTables from_bits(std::uint64_t limit, std::vector<std::uint64_t> words) {
    check_limit(limit);
    PrimeTables t;
    t.limit_ = limit;
    words.resize(word_count(limit), 0);
    const std::uint64_t tail = (limit + 1) % 64;
    if (tail != 0) words.back() &= (std::uint64_t{1} << tail) - 1;
    t.words_ = std::move(words);

    const std::uint64_t blocks = (t.words_.size() + kWordsPerBlock - 1) / kWordsPerBlock;
    t.block_rank_.assign(blocks + 1, 0);
    std::uint64_t running = 0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      t.block_rank_[b] = static_cast<std::uint32_t>(running);
      const std::uint64_t end = std::min<std::uint64_t>(t.words_.size(), (b + 1) * kWordsPerBlock);
      for (std::uint64_t w = b * kWordsPerBlock; w < end; ++w) running += std::popcount(t.words_[w]);
    }
    t.block_rank_[blocks] = static_cast<std::uint32_t>(running);

    t.primes_.reserve(running);
    for (std::uint64_t w = 0; w < t.words_.size(); ++w) {
      std::uint64_t bits = t.words_[w];
      while (bits != 0) {
        t.primes_.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return t;
  }

  std::uint64_t limit() const noexcept { return limit_; }

  // K, the number of sieved primes.
  std::uint64_t prime_count() const noexcept { return primes_.size(); }

  std::uint64_t largest_prime() const noexcept { return primes_.empty() ? 0 : primes_.back(); }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }

  bool is_prime(std::uint64_t n) const {
    if (n > limit_) throw OutOfRangeError("is_prime: " + std::to_string(n) + " exceeds sieve limit " + std::to_string(limit_), n);
    return (words_[n / 64] >> (n % 64)) & 1U;
  }

  // pi(x) = #{p prime : p <= x}.
  std::uint64_t pi_of(std::uint64_t x) const {
    if (x > limit_) throw OutOfRangeError("pi: " + std::to_string(x) + " exceeds sieve limit " + std::to_string(limit_), x);
    const std::uint64_t word = x / 64;
    const std::uint64_t block = word / kWordsPerBlock;
    std::uint64_t count = block_rank_[block];
    for (std::uint64_t w = block * kWordsPerBlock; w < word; ++w) count += std::popcount(words_[w]);
    const std::uint64_t shift = x % 64;
    const std::uint64_t mask = shift == 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (shift + 1)) - 1;
    return count + std::popcount(words_[word] & mask);
  }

  // p_m, 1-based.
  std::uint64_t nth_prime(std::uint64_t m) const {
    if (m == 0 || m > primes_.size())
      throw OutOfRangeError("nth_prime: index " + std::to_string(m) + " outside sieved range [1, " +
                                std::to_string(primes_.size()) + "]",
                            m);
    return primes_[m - 1];
  }

  // g_m = p_{m+1} - p_m.
  std::uint64_t gap(std::uint64_t m) const {
    if (m == 0 || m >= primes_.size())
      throw OutOfRangeError("gap: p_" + std::to_string(m + 1) + " is not sieved (limit " + std::to_string(limit_) + ")", m);
    return primes_[m] - primes_[m - 1];
  }

  static std::uint64_t word_count(std::uint64_t limit) noexcept { return limit / 64 + 1; }

  static void check_limit(std::uint64_t limit) {
    if (limit < 2) throw UsageError("sieve limit must be at least 2, got " + std::to_string(limit));
    if (limit > kMaxLimit) throw UsageError("sieve limit " + std::to_string(limit) + " exceeds 2^32 - 1");
  }

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint32_t> block_rank_;
  std::vector<std::uint32_t> primes_;
};

namespace detail {

inline std::vector<std::uint32_t> small_primes(std::uint64_t bound) {
  std::vector<bool> composite(bound + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

inline std::uint64_t isqrt64(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Sieves [lo, min(lo + size, limit + 1)) into the 64-bit words starting at lo / 64.
inline void sieve_segment(std::uint64_t lo, std::uint64_t size, std::uint64_t limit,
                          std::span<const std::uint32_t> base, std::vector<std::uint8_t>& scratch,
                          std::uint64_t* out_words) {
  const std::uint64_t hi = std::min(lo + size, limit + 1);
  const std::uint64_t len = hi - lo;
  scratch.assign(len, 1);
  for (std::uint64_t i = lo; i < std::min<std::uint64_t>(hi, 2); ++i) scratch[i - lo] = 0;
  for (const std::uint32_t p : base) {
    const std::uint64_t pp = std::uint64_t{p} * p;
    if (pp >= hi) break;
    std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
    for (std::uint64_t j = start; j < hi; j += p) scratch[j - lo] = 0;
  }
  const std::uint64_t nwords = (len + 63) / 64;
  for (std::uint64_t w = 0; w < nwords; ++w) {
    std::uint64_t word = 0;
    const std::uint64_t end = std::min<std::uint64_t>(64, len - w * 64);
    for (std::uint64_t b = 0; b < end; ++b) word |= std::uint64_t{scratch[w * 64 + b]} << b;
    out_words[w] = word;
  }
}

}  // namespace detail

// Segmented sieve of Eratosthenes over [0, limit]. Output is independent of
// segment size and thread count.
inline PrimeTables build_tables(std::uint64_t limit, const SieveOptions& opts = {}) {
  PrimeTables::check_limit(limit);
  if (opts.segment_size == 0 || opts.segment_size % 64 != 0)
    throw UsageError("segment size must be a positive multiple of 64");

  const auto base = detail::small_primes(detail::isqrt64(limit));
  std::vector<std::uint64_t> words(PrimeTables::word_count(limit), 0);
  const std::uint64_t segments = (limit + opts.segment_size) / opts.segment_size;
  const unsigned threads = static_cast<unsigned>(
      std::clamp<std::uint64_t>(opts.threads == 0 ? 1 : opts.threads, 1, segments));

  auto worker = [&](unsigned t) {
    std::vector<std::uint8_t> scratch;
    for (std::uint64_t s = t; s < segments; s += threads) {
      const std::uint64_t lo = s * opts.segment_size;
      detail::sieve_segment(lo, opts.segment_size, limit, base, scratch, words.data() + lo / 64);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }
  return PrimeTables::from_bits(limit, std::move(words));
}

struct GapRatio {
  std::uint64_t m;
  double ratio;
};

// Cramer ratios g_m / ln^2 p_m.
struct GapStats {
  double max_ratio = 0.0;
  std::uint64_t argmax_m = 0;
  std::vector<GapRatio> ratio_series;
};

inline double cramer_ratio(const PrimeTables& tables, std::uint64_t m) {
  const double lp = std::log(static_cast<double>(tables.nth_prime(m)));
  return static_cast<double>(tables.gap(m)) / (lp * lp);
}

// Scans every m >= first_m whose gap is sieved.
inline GapStats cramer_stats(const PrimeTables& tables, std::uint64_t first_m = 1, bool keep_series = false) {
  if (tables.limit() < 3) throw UsageError("cramer_stats needs a sieve limit of at least 3");
  if (first_m == 0) throw UsageError("gap index starts at 1");
  GapStats stats;
  for (std::uint64_t m = first_m; m < tables.prime_count(); ++m) {
    const double r = cramer_ratio(tables, m);
    if (keep_series) stats.ratio_series.push_back({m, r});
    if (stats.argmax_m == 0 || r > stats.max_ratio) {
      stats.max_ratio = r;
      stats.argmax_m = m;
    }
  }
  return stats;
}

enum class DusartBound { Lower, Upper };

struct DusartViolation {
  std::uint64_t x;
  DusartBound bound;
  std::uint64_t pi;
  double bound_value;
};

// Checks x/(ln x - 1) <= pi(x) on [max(x_lo, 5393), x_hi] and
// pi(x) <= x/(ln x - 1.1) on [max(x_lo, 60184), x_hi].
inline std::vector<DusartViolation> dusart_check(const PrimeTables& tables, std::uint64_t x_lo, std::uint64_t x_hi) {
  if (x_lo < 2) throw UsageError("dusart_check: x_lo must be at least 2");
  if (x_hi > tables.limit())
    throw OutOfRangeError("dusart_check: x_hi " + std::to_string(x_hi) + " exceeds sieve limit " + std::to_string(tables.limit()), x_hi);
  std::vector<DusartViolation> out;
  if (x_hi < x_lo) return out;
  const std::uint64_t from = std::max(x_lo, kDusartLowerFrom);
  if (from > x_hi) return out;
  std::uint64_t pi = tables.pi_of(from - 1);
  for (std::uint64_t x = from; x <= x_hi; ++x) {
    if (tables.is_prime(x)) ++pi;
    const double xd = static_cast<double>(x);
    const double lx = std::log(xd);
    const double lower = xd / (lx - 1.0);
    if (static_cast<double>(pi) < lower) out.push_back({x, DusartBound::Lower, pi, lower});
    if (x >= kDusartUpperFrom) {
      const double upper = xd / (lx - 1.1);
      if (static_cast<double>(pi) > upper) out.push_back({x, DusartBound::Upper, pi, upper});
    }
  }
  return out;
}

}  // namespace nlab
