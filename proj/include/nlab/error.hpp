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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nlab {

// Bad arguments from the caller: base < 2, empty needle, limit < 2, ...
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A query or stream needed data beyond what the prime tables cover.
class OutOfRangeError : public std::out_of_range {
 public:
  explicit OutOfRangeError(const std::string& what, std::uint64_t index = 0)
      : std::out_of_range(what), index_(index) {}

  // The offending argument (n, m or x) when one exists.
  std::uint64_t index() const noexcept { return index_; }

 private:
  std::uint64_t index_;
};

// Evaluation point outside the domain of a piecewise function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Sample point below the validity threshold of a bound.
class ThresholdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two independent computations of the same exact quantity disagree.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A sieve cache file failed validation.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlab
