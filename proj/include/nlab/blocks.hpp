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
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "nlab/digits.hpp"
#include "nlab/error.hpp"
#include "nlab/primes.hpp"

namespace nlab {

// Start positions i with haystack[i, i + len(needle)) == needle, overlaps included.
inline std::uint64_t count_overlapping(const Block& haystack, const Block& needle) {
  if (needle.digits.empty()) throw UsageError("needle must contain at least one digit");
  if (haystack.base != needle.base) throw UsageError("haystack and needle use different bases");
  const auto& h = haystack.digits;
  const auto& n = needle.digits;
  if (h.size() < n.size()) return 0;

  // KMP failure function; after a full match fall back to the border so
  // self-overlapping occurrences are found.
  std::vector<std::size_t> fail(n.size(), 0);
  for (std::size_t i = 1, k = 0; i < n.size(); ++i) {
    while (k > 0 && n[i] != n[k]) k = fail[k - 1];
    if (n[i] == n[k]) ++k;
    fail[i] = k;
  }
  std::uint64_t count = 0;
  for (std::size_t i = 0, k = 0; i < h.size(); ++i) {
    while (k > 0 && h[i] != n[k]) k = fail[k - 1];
    if (h[i] == n[k]) ++k;
    if (k == n.size()) {
      ++count;
      k = fail[k - 1];
    }
  }
  return count;
}

// Blocks of length k are keyed by their value as a base-g numeral.
inline std::optional<std::uint64_t> block_space(unsigned base, unsigned order) {
  std::uint64_t size = 1;
  for (unsigned i = 0; i < order; ++i) {
    if (size > UINT64_MAX / base) return std::nullopt;
    size *= base;
  }
  return size;
}

inline Block block_of_code(std::uint64_t code, unsigned base, unsigned order) {
  Block b{base, std::vector<Digit>(order, 0)};
  for (unsigned i = order; i-- > 0;) {
    b.digits[i] = static_cast<Digit>(code % base);
    code /= base;
  }
  return b;
}

inline std::uint64_t code_of_block(const Block& block) {
  std::uint64_t code = 0;
  for (const Digit d : block.digits) code = code * block.base + d;
  return code;
}

// Occurrence counts A_E of every length-k block over a digit prefix.
// Dense storage when g^k <= kDenseLimit, otherwise a hash map.
class BlockCensus {
 public:
  static constexpr std::uint64_t kDenseLimit = 10'000'000;

  BlockCensus(unsigned base, unsigned order) : base_(base), order_(order) {
    check_base(base);
    if (order < 1) throw UsageError("block order must be at least 1");
    const auto space = nlab::block_space(base, order);
    if (!space) throw UsageError("g^k does not fit in 64 bits");
    space_ = *space;
    if (space_ <= kDenseLimit) dense_.assign(space_, 0);
  }

  unsigned base() const noexcept { return base_; }
  unsigned order() const noexcept { return order_; }
  std::uint64_t n_digits() const noexcept { return n_digits_; }
  std::uint64_t block_space() const noexcept { return space_; }
  bool is_dense() const noexcept { return !dense_.empty(); }

  std::uint64_t windows() const noexcept { return n_digits_ >= order_ ? n_digits_ - order_ + 1 : 0; }

  std::uint64_t count(std::uint64_t code) const {
    if (is_dense()) return code < space_ ? dense_[code] : 0;
    const auto it = sparse_.find(code);
    return it == sparse_.end() ? 0 : it->second;
  }

  std::uint64_t count(const Block& block) const {
    if (block.base != base_ || block.length() != order_) return 0;
    return count(code_of_block(block));
  }

  // Calls fn(code, count) for every block with a nonzero count, in code order.
  template <typename Fn>
  void for_each_nonzero(Fn&& fn) const {
    if (is_dense()) {
      for (std::uint64_t c = 0; c < space_; ++c)
        if (dense_[c] != 0) fn(c, dense_[c]);
      return;
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted(sparse_.begin(), sparse_.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [c, n] : sorted) fn(c, n);
  }

  std::uint64_t distinct_blocks() const {
    if (!is_dense()) return sparse_.size();
    return static_cast<std::uint64_t>(std::count_if(dense_.begin(), dense_.end(), [](auto v) { return v != 0; }));
  }

  void add(std::uint64_t code, std::uint64_t n = 1) {
    if (is_dense()) dense_[code] += n;
    else sparse_[code] += n;
  }

  void add_digits(std::uint64_t n) noexcept { n_digits_ += n; }

  // Counts add; digit totals add. Used to merge shards whose windows are disjoint.
  void merge_counts(const BlockCensus& other) {
    if (other.base_ != base_ || other.order_ != order_) throw UsageError("cannot merge censuses of different shape");
    other.for_each_nonzero([this](std::uint64_t c, std::uint64_t n) { add(c, n); });
  }

  void set_n_digits(std::uint64_t n) noexcept { n_digits_ = n; }

  friend bool operator==(const BlockCensus& a, const BlockCensus& b) {
    if (a.base_ != b.base_ || a.order_ != b.order_ || a.n_digits_ != b.n_digits_) return false;
    if (a.is_dense()) return a.dense_ == b.dense_;
    if (a.sparse_.size() != b.sparse_.size()) return false;
    for (const auto& [c, n] : a.sparse_)
      if (b.count(c) != n) return false;
    return true;
  }

 private:
  unsigned base_;
  unsigned order_;
  std::uint64_t space_ = 0;
  std::uint64_t n_digits_ = 0;
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
};

namespace detail {

// Rolling base-g window code; counts a window once `order` digits have been seen.
class WindowCounter {
 public:
  WindowCounter(BlockCensus& census) : census_(census), modulus_(census.block_space()), base_(census.base()) {}

  void feed(std::span<const Digit> digits) {
    const unsigned k = census_.order();
    for (const Digit d : digits) {
      code_ = (code_ % (modulus_ / base_)) * base_ + d;
      if (seen_ < k) ++seen_;
      if (seen_ == k) census_.add(code_);
    }
  }

 private:
  BlockCensus& census_;
  std::uint64_t modulus_;
  unsigned base_;
  std::uint64_t code_ = 0;
  unsigned seen_ = 0;
};

inline constexpr std::size_t kChunk = 1 << 16;

inline void drain(DigitStream& stream, WindowCounter& counter, std::uint64_t* digit_total = nullptr) {
  std::vector<Digit> buf(kChunk);
  for (std::size_t got; (got = stream.read(buf)) != 0;) {
    counter.feed(std::span<const Digit>(buf.data(), got));
    if (digit_total != nullptr) *digit_total += got;
  }
}

}  // namespace detail

// Census over an explicit digit string.
inline BlockCensus census_of(const Block& digits, unsigned order) {
  BlockCensus census(digits.base, order);
  detail::WindowCounter counter(census);
  counter.feed(digits.digits);
  census.set_n_digits(digits.length());
  return census;
}

struct EntryScope {
  std::uint64_t entries;
};

struct DigitScope {
  std::uint64_t digits;
};

using CensusScope = std::variant<EntryScope, DigitScope>;

struct CensusOptions {
  unsigned threads = 1;
  // Number of entry-range shards; 0 means one per thread.
  unsigned shards = 0;
};

namespace detail {

inline BlockCensus census_sequential(const StreamSpec& spec, unsigned order, const CensusScope& scope,
                                     const PrimeTables* tables) {
  BlockCensus census(spec.base, order);
  std::optional<std::uint64_t> entries;
  std::optional<std::uint64_t> digits;
  if (const auto* e = std::get_if<EntryScope>(&scope)) entries = e->entries;
  else digits = std::get<DigitScope>(scope).digits;
  DigitStream stream(spec, tables, spec.start_index, entries, digits);
  WindowCounter counter(census);
  std::uint64_t total = 0;
  drain(stream, counter, &total);
  census.set_n_digits(total);
  return census;
}

struct Shard {
  std::uint64_t first_index;
  std::uint64_t digit_offset;
};

// Splits the scanned prefix into entry-aligned shards and records the digit
// offset at which each starts. Returns the shards and the total digit count.
inline std::pair<std::vector<Shard>, std::uint64_t> plan_shards(const StreamSpec& spec, const CensusScope& scope,
                                                                const PrimeTables* tables, unsigned shard_count) {
  std::vector<Shard> shards;
  const std::uint64_t first = spec.start_index;
  if (const auto* e = std::get_if<EntryScope>(&scope)) {
    const std::uint64_t n = e->entries;
    std::uint64_t offset = 0;
    std::uint64_t prev = first;
    shards.push_back({first, 0});
    for (unsigned s = 1; s < shard_count; ++s) {
      const std::uint64_t boundary = first + n * s / shard_count;
      DigitStream walk(spec, tables, prev, boundary - prev, std::nullopt);
      std::vector<Digit> buf(kChunk);
      while (walk.read(buf) != 0) {
      }
      offset += walk.digits_emitted();
      shards.push_back({boundary, offset});
      prev = boundary;
    }
    DigitStream walk(spec, tables, prev, first + n - prev, std::nullopt);
    std::vector<Digit> buf(kChunk);
    while (walk.read(buf) != 0) {
    }
    return {shards, offset + walk.digits_emitted()};
  }

  const std::uint64_t total = std::get<DigitScope>(scope).digits;
  shards.push_back({first, 0});
  std::uint64_t n = first;
  std::uint64_t offset = 0;
  unsigned next_cut = 1;
  while (next_cut < shard_count && offset < total) {
    const std::uint64_t target = total * next_cut / shard_count;
    if (offset >= target) {
      if (offset > shards.back().digit_offset) shards.push_back({n, offset});
      ++next_cut;
      continue;
    }
    offset += digit_length(entry_value(spec.kind, n, tables), spec.base);
    ++n;
  }
  return {shards, total};
}

}  // namespace detail

// Census of every length-k window of the digit prefix selected by scope.
// Windows that straddle entry boundaries are counted. With more than one
// shard, each shard owns the windows starting in its digits and reads k-1
// digits past its end; the merged result equals the sequential census.
inline BlockCensus census(const StreamSpec& spec, unsigned order, const CensusScope& scope, const PrimeTables* tables,
                          const CensusOptions& opts = {}) {
  spec.validate();
  if (order < 1) throw UsageError("block order must be at least 1");
  std::visit([](const auto& s) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, EntryScope>) {
      if (s.entries == 0) throw UsageError("entry count must be positive");
    } else {
      if (s.digits == 0) throw UsageError("digit count must be positive");
    }
  }, scope);

  const unsigned threads = std::max(1U, opts.threads);
  const unsigned shard_count = opts.shards == 0 ? threads : opts.shards;
  if (shard_count <= 1) return detail::census_sequential(spec, order, scope, tables);

  const auto [shards, total] = detail::plan_shards(spec, scope, tables, shard_count);
  std::vector<BlockCensus> partial(shards.size(), BlockCensus(spec.base, order));

  auto run_shard = [&](std::size_t i) {
    const std::uint64_t own_end = i + 1 < shards.size() ? shards[i + 1].digit_offset : total;
    const std::uint64_t own = own_end - shards[i].digit_offset;
    detail::WindowCounter counter(partial[i]);
    DigitStream body(spec, tables, shards[i].first_index, std::nullopt, own);
    detail::drain(body, counter);
    const std::uint64_t tail = std::min<std::uint64_t>(order - 1, total - own_end);
    if (tail > 0) {
      // Only non-final shards have a tail, and their ends are entry-aligned.
      const std::uint64_t tail_first = shards[i + 1].first_index;
      DigitStream rest(spec, tables, tail_first, std::nullopt, std::nullopt);
      std::vector<Digit> buf(tail);
      const std::size_t got = rest.read(buf);
      counter.feed(std::span<const Digit>(buf.data(), got));
    }
  };

  std::vector<std::jthread> pool;
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= shards.size()) return;
        i = next++;
      }
      run_shard(i);
    }
  };
  const unsigned spawn = std::min<unsigned>(threads, static_cast<unsigned>(shards.size()));
  if (spawn <= 1) {
    worker();
  } else {
    for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
    pool.clear();
  }

  BlockCensus merged(spec.base, order);
  for (const auto& p : partial) merged.merge_counts(p);
  merged.set_n_digits(total);
  return merged;
}

struct FrequencyRow {
  Block block;
  std::uint64_t count;
  double frequency;
  double expected;
};

// Per-block frequencies against a reference distribution.
struct FrequencyReport {
  unsigned base = 10;
  unsigned order = 1;
  std::uint64_t denominator = 0;
  std::vector<FrequencyRow> rows;
  double max_deviation = 0.0;
};

// Reports with at most this many blocks list zero-count rows too.
inline constexpr std::uint64_t kFullRowLimit = 1 << 16;

// Frequency = count / (n_digits - k + 1), compared against g^-k.
inline FrequencyReport frequency_report(const BlockCensus& census) {
  if (census.n_digits() < census.order()) throw UsageError("census has fewer digits than its order");
  FrequencyReport r;
  r.base = census.base();
  r.order = census.order();
  r.denominator = census.windows();
  const double expected = std::pow(static_cast<double>(census.base()), -static_cast<double>(census.order()));
  const double denom = static_cast<double>(r.denominator);
  auto row = [&](std::uint64_t code, std::uint64_t n) {
    const double f = static_cast<double>(n) / denom;
    r.rows.push_back({block_of_code(code, census.base(), census.order()), n, f, expected});
    r.max_deviation = std::max(r.max_deviation, std::abs(f - expected));
  };
  if (census.block_space() <= kFullRowLimit) {
    for (std::uint64_t c = 0; c < census.block_space(); ++c) row(c, census.count(c));
  } else {
    census.for_each_nonzero(row);
    if (census.distinct_blocks() < census.block_space()) r.max_deviation = std::max(r.max_deviation, expected);
  }
  return r;
}

// Leading-digit distribution of a(n) over `entries` entries; a(n) = 0 has no
// leading significant digit and is left out of the denominator. Reference
// values follow Benford's law, log_g(1 + 1/d).
inline FrequencyReport benford_leading(const StreamSpec& spec, std::uint64_t entries, const PrimeTables* tables) {
  spec.validate();
  if (entries < 1) throw UsageError("benford needs at least one entry");
  const unsigned g = spec.base;
  std::vector<std::uint64_t> counts(g, 0);
  std::uint64_t counted = 0;
  for (std::uint64_t i = 0; i < entries; ++i) {
    std::uint64_t v = entry_value(spec.kind, spec.start_index + i, tables);
    if (v == 0) continue;
    while (v >= g) v /= g;
    ++counts[v];
    ++counted;
  }
  FrequencyReport r;
  r.base = g;
  r.order = 1;
  r.denominator = counted;
  for (unsigned d = 1; d < g; ++d) {
    const double f = counted == 0 ? 0.0 : static_cast<double>(counts[d]) / static_cast<double>(counted);
    const double expected = std::log1p(1.0 / d) / std::log(static_cast<double>(g));
    r.rows.push_back({Block{g, {static_cast<Digit>(d)}}, counts[d], f, expected});
    r.max_deviation = std::max(r.max_deviation, std::abs(f - expected));
  }
  return r;
}

}  // namespace nlab
