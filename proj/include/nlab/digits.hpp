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
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlab/error.hpp"
#include "nlab/primes.hpp"

namespace nlab {

using Digit = std::uint8_t;

inline constexpr unsigned kMinBase = 2;
inline constexpr unsigned kMaxBase = 36;

inline void check_base(unsigned base) {
  if (base < kMinBase || base > kMaxBase)
    throw UsageError("base must lie in [2, 36], got " + std::to_string(base));
}

inline char digit_char(Digit d) { return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10)); }

// A finite string of base-g digits, most significant first.
struct Block {
  unsigned base = 10;
  std::vector<Digit> digits;

  std::size_t length() const noexcept { return digits.size(); }

  std::string to_string() const {
    std::string s;
    s.reserve(digits.size());
    for (const Digit d : digits) s.push_back(digit_char(d));
    return s;
  }

  // Parses characters 0-9, a-z (case-insensitive).
  static Block parse(std::string_view text, unsigned base) {
    check_base(base);
    Block b{base, {}};
    b.digits.reserve(text.size());
    for (const char c : text) {
      unsigned v = 0;
      if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'z') v = static_cast<unsigned>(c - 'a') + 10;
      else if (c >= 'A' && c <= 'Z') v = static_cast<unsigned>(c - 'A') + 10;
      else throw UsageError(std::string("not a digit: '") + c + "'");
      if (v >= base) throw UsageError(std::string("digit '") + c + "' out of range for base " + std::to_string(base));
      b.digits.push_back(static_cast<Digit>(v));
    }
    return b;
  }

  friend bool operator==(const Block&, const Block&) = default;
};

// Writes the expansion of n least-significant first into buf; returns length.
inline std::size_t digits_reversed(std::uint64_t n, unsigned base, std::span<Digit, 64> buf) noexcept {
  std::size_t len = 0;
  do {
    buf[len++] = static_cast<Digit>(n % base);
    n /= base;
  } while (n != 0);
  return len;
}

inline Block digits_of(std::uint64_t n, unsigned base) {
  check_base(base);
  std::array<Digit, 64> buf{};
  const std::size_t len = digits_reversed(n, base, buf);
  Block b{base, std::vector<Digit>(len)};
  std::reverse_copy(buf.begin(), buf.begin() + len, b.digits.begin());
  return b;
}

inline std::size_t digit_length(std::uint64_t n, unsigned base) noexcept {
  std::size_t len = 1;
  while (n >= base) {
    n /= base;
    ++len;
  }
  return len;
}

enum class SequenceKind { Natural, Square, FloorSqrt, Primes, PrimeCount };

inline std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Natural: return "natural";
    case SequenceKind::Square: return "square";
    case SequenceKind::FloorSqrt: return "floor-sqrt";
    case SequenceKind::Primes: return "primes";
    case SequenceKind::PrimeCount: return "prime-count";
  }
  return "?";
}

inline SequenceKind parse_sequence_kind(std::string_view name) {
  for (auto k : {SequenceKind::Natural, SequenceKind::Square, SequenceKind::FloorSqrt, SequenceKind::Primes,
                 SequenceKind::PrimeCount})
    if (to_string(k) == name) return k;
  throw UsageError("unknown sequence '" + std::string(name) + "'");
}

// Which sequence, in which base, from which index, and for how many entries
// (unbounded when entry_count is empty).
struct StreamSpec {
  SequenceKind kind = SequenceKind::PrimeCount;
  unsigned base = 10;
  std::uint64_t start_index = 1;
  std::optional<std::uint64_t> entry_count;

  void validate() const {
    check_base(base);
    if (start_index > 1) throw UsageError("start index must be 0 or 1");
    if (kind == SequenceKind::Primes && start_index == 0) throw UsageError("the prime sequence starts at p_1");
  }
};

inline bool needs_tables(SequenceKind kind) {
  return kind == SequenceKind::Primes || kind == SequenceKind::PrimeCount;
}

// a(n) for a single index. Sequential streams use an incremental path instead.
inline std::uint64_t entry_value(SequenceKind kind, std::uint64_t n, const PrimeTables* tables) {
  switch (kind) {
    case SequenceKind::Natural: return n;
    case SequenceKind::Square:
      if (n > 0xFFFFFFFFull) throw OutOfRangeError("square: n = " + std::to_string(n) + " overflows 64 bits", n);
      return n * n;
    case SequenceKind::FloorSqrt: return detail::isqrt64(n);
    case SequenceKind::Primes:
      if (tables == nullptr) throw UsageError("prime sequence needs prime tables");
      if (n == 0 || n > tables->prime_count())
        throw OutOfRangeError("stream exhausted the sieve at n = " + std::to_string(n) + " (p_n not sieved)", n);
      return tables->nth_prime(n);
    case SequenceKind::PrimeCount:
      if (tables == nullptr) throw UsageError("prime-count sequence needs prime tables");
      if (n > tables->limit())
        throw OutOfRangeError("stream exhausted the sieve at n = " + std::to_string(n) + " (limit " +
                                  std::to_string(tables->limit()) + ")",
                              n);
      return tables->pi_of(n);
  }
  return 0;
}

// Pull-based digit source for 0.a(first)a(first+1)... . Holds one entry's
// digits at a time. Stops after `entries` values of a(n) and/or `max_digits`
// digits, whichever comes first; unbounded otherwise.
class DigitStream {
 public:
  DigitStream(const StreamSpec& spec, const PrimeTables* tables)
      : DigitStream(spec, tables, spec.start_index, spec.entry_count, std::nullopt) {}

  DigitStream(const StreamSpec& spec, const PrimeTables* tables, std::uint64_t first_index,
              std::optional<std::uint64_t> entries, std::optional<std::uint64_t> max_digits)
      : kind_(spec.kind), base_(spec.base), tables_(tables), next_index_(first_index), entries_left_(entries),
        digits_left_(max_digits) {
    spec.validate();
    if (needs_tables(kind_) && tables_ == nullptr) throw UsageError("sequence '" + std::string(to_string(kind_)) + "' needs prime tables");
    if (kind_ == SequenceKind::Primes && first_index == 0) throw UsageError("the prime sequence starts at p_1");
  }

  unsigned base() const noexcept { return base_; }

  // Index of the entry whose digits come next.
  std::uint64_t next_index() const noexcept { return next_index_; }

  std::uint64_t digits_emitted() const noexcept { return emitted_; }

  // Fills as much of `out` as possible; returns 0 once the stream is done.
  std::size_t read(std::span<Digit> out) {
    std::size_t n = 0;
    while (n < out.size()) {
      if (digits_left_ && *digits_left_ == 0) break;
      if (pos_ == 0 && !load_entry()) break;
      std::size_t take = std::min<std::size_t>(pos_, out.size() - n);
      if (digits_left_) take = static_cast<std::size_t>(std::min<std::uint64_t>(take, *digits_left_));
      for (std::size_t i = 0; i < take; ++i) out[n + i] = buf_[--pos_];
      n += take;
      if (digits_left_) *digits_left_ -= take;
    }
    emitted_ += n;
    return n;
  }

  bool next(Digit& d) { return read(std::span<Digit>(&d, 1)) == 1; }

 private:
  // Decodes the next entry into buf_ (reversed); false when entries run out.
  bool load_entry() {
    if (entries_left_) {
      if (*entries_left_ == 0) return false;
      --*entries_left_;
    }
    const std::uint64_t n = next_index_++;
    const std::uint64_t value = advance_value(n);
    pos_ = digits_reversed(value, base_, buf_);
    return true;
  }

  std::uint64_t advance_value(std::uint64_t n) {
    if (!have_value_) {
      value_ = entry_value(kind_, n, tables_);
      have_value_ = true;
      return value_;
    }
    switch (kind_) {
      case SequenceKind::PrimeCount:
        if (n > tables_->limit())
          throw OutOfRangeError("stream exhausted the sieve at n = " + std::to_string(n) + " (limit " +
                                    std::to_string(tables_->limit()) + ")",
                                n);
        if (tables_->is_prime(n)) ++value_;
        return value_;
      case SequenceKind::FloorSqrt:
        if (static_cast<unsigned __int128>(value_ + 1) * (value_ + 1) <= n) ++value_;
        return value_;
      default:
        value_ = entry_value(kind_, n, tables_);
        return value_;
    }
  }

  SequenceKind kind_;
  unsigned base_;
  const PrimeTables* tables_;
  std::uint64_t next_index_;
  std::optional<std::uint64_t> entries_left_;
  std::optional<std::uint64_t> digits_left_;
  std::uint64_t emitted_ = 0;
  std::array<Digit, 64> buf_{};
  std::size_t pos_ = 0;
  std::uint64_t value_ = 0;
  bool have_value_ = false;
};

// First n_digits digits of the constant described by spec.
inline Block prefix(const StreamSpec& spec, std::uint64_t n_digits, const PrimeTables* tables) {
  if (n_digits < 1) throw UsageError("prefix needs at least one digit");
  DigitStream stream(spec, tables, spec.start_index, spec.entry_count, n_digits);
  Block b{spec.base, std::vector<Digit>(n_digits)};
  const std::size_t got = stream.read(b.digits);
  b.digits.resize(got);
  return b;
}

// Digit dump: optional header "# kind base start entries", then one line of digits.
inline std::string dump_header(const StreamSpec& spec) {
  return "# " + std::string(to_string(spec.kind)) + " " + std::to_string(spec.base) + " " +
         std::to_string(spec.start_index) + " " + (spec.entry_count ? std::to_string(*spec.entry_count) : "unbounded");
}

}  // namespace nlab
