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

// On-disk sieve cache:
//   "NLAB1" | limit (u64, little endian) | ceil((limit + 1) / 8) bytes
// Bit i of the payload (LSB first within each byte) is set iff i is prime.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nlab/error.hpp"
#include "nlab/primes.hpp"

namespace nlab {

inline constexpr std::array<char, 5> kCacheMagic = {'N', 'L', 'A', 'B', '1'};
inline constexpr std::uint64_t kCacheChecksumPrefix = 10'000;

inline void save_cache(const PrimeTables& tables, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CacheError("cannot open " + path.string() + " for writing");
  out.write(kCacheMagic.data(), kCacheMagic.size());
  std::array<char, 8> le{};
  for (int i = 0; i < 8; ++i) le[i] = static_cast<char>((tables.limit() >> (8 * i)) & 0xFF);
  out.write(le.data(), le.size());

  const std::uint64_t nbytes = (tables.limit() + 1 + 7) / 8;
  std::vector<char> payload(nbytes);
  const auto words = tables.words();
  for (std::uint64_t i = 0; i < nbytes; ++i)
    payload[i] = static_cast<char>((words[i / 8] >> (8 * (i % 8))) & 0xFF);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw CacheError("short write to " + path.string());
}

// Loads and validates a cache file: magic, exact payload length, and the
// first 10^4 bits against a fresh sieve.
inline PrimeTables load_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open " + path.string());
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCacheMagic) throw CacheError(path.string() + ": bad magic");
  std::array<unsigned char, 8> le{};
  in.read(reinterpret_cast<char*>(le.data()), le.size());
  if (!in) throw CacheError(path.string() + ": truncated header");
  std::uint64_t limit = 0;
  for (int i = 0; i < 8; ++i) limit |= std::uint64_t{le[i]} << (8 * i);
  if (limit < 2 || limit > PrimeTables::kMaxLimit) throw CacheError(path.string() + ": implausible limit " + std::to_string(limit));

  const std::uint64_t nbytes = (limit + 1 + 7) / 8;
  std::vector<unsigned char> payload(nbytes);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(nbytes));
  if (!in) throw CacheError(path.string() + ": truncated payload");
  if (in.peek() != std::char_traits<char>::eof()) throw CacheError(path.string() + ": trailing bytes");

  std::vector<std::uint64_t> words(PrimeTables::word_count(limit), 0);
  for (std::uint64_t i = 0; i < nbytes; ++i) words[i / 8] |= std::uint64_t{payload[i]} << (8 * (i % 8));
  auto tables = PrimeTables::from_bits(limit, std::move(words));

  const std::uint64_t prefix = std::min(limit, kCacheChecksumPrefix);
  const auto fresh = build_tables(std::max<std::uint64_t>(prefix, 2));
  for (std::uint64_t i = 0; i <= prefix; ++i)
    if (tables.is_prime(i) != fresh.is_prime(i))
      throw CacheError(path.string() + ": checksum mismatch at " + std::to_string(i));
  return tables;
}

}  // namespace nlab
