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

// Finite-x samples of log f(x) / log x and log f'(x) / log x against explicit
// bound curves, plus the bound that an RH-strength gap estimate would give.
// Natural logarithms throughout; binary64 only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nlab/error.hpp"
#include "nlab/primes.hpp"
#include "nlab/rational.hpp"
#include "nlab/svfun.hpp"

namespace nlab {

inline constexpr double kEtaSlack = 1e-12;
inline constexpr double kFprimeCeiling = 0.51;
inline constexpr double kFprimeFrom = 5.0;
inline constexpr double kRhFrom = 3.0;

enum class EtaTarget { F, Fprime, RhLower };

inline std::string_view to_string(EtaTarget t) {
  switch (t) {
    case EtaTarget::F: return "f";
    case EtaTarget::Fprime: return "fprime";
    case EtaTarget::RhLower: return "rh";
  }
  return "?";
}

inline EtaTarget parse_eta_target(std::string_view s) {
  for (auto t : {EtaTarget::F, EtaTarget::Fprime, EtaTarget::RhLower})
    if (to_string(t) == s) return t;
  throw UsageError("unknown eta target '" + std::string(s) + "'");
}

struct EtaSample {
  double x = 0.0;
  double value = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  EtaTarget target = EtaTarget::F;

  // lower <= value <= upper up to kEtaSlack. Not asserted for RhLower.
  bool sandwiched() const noexcept {
    return lower_bound - kEtaSlack <= value && value <= upper_bound + kEtaSlack;
  }
};

// M = max(2.2, 1.05 * max Cramer ratio over the sieved gaps).
inline double big_m_auto(const PrimeTables& tables) {
  return std::max(2.2, 1.05 * cramer_stats(tables).max_ratio);
}

// ln( x ln( x ln(x / (ln x - 1.1)) / (ln x - 1.1) ) / (ln x - 1.1) )
inline double nested_log_bound(double x) {
  const double d = std::log(x) - 1.1;
  const double inner = std::log(x / d);
  const double middle = std::log(x * inner / d);
  return std::log(x * middle / d);
}

namespace detail {

inline void check_within(const SvFunction& fn, double x) {
  if (!(x <= static_cast<double>(fn.domain_end())))
    throw OutOfRangeError("x = " + std::to_string(x) + " lies beyond the largest sieved prime " +
                              std::to_string(fn.domain_end()),
                          static_cast<std::uint64_t>(std::max(0.0, x)));
}

}  // namespace detail

// value = ln f(x) / ln x, between ln(x/(ln x - 1)) / ln x and ln(x/(ln x - 1.1) + 1) / ln x.
inline EtaSample eta_f_sample(const SvFunction& fn, double x) {
  if (!(x >= static_cast<double>(kDusartUpperFrom)))
    throw ThresholdError("eta_f_sample needs x >= " + std::to_string(kDusartUpperFrom));
  detail::check_within(fn, x);
  const double lx = std::log(x);
  const double fx = to_double(fn.value(from_double(x)));
  EtaSample s;
  s.x = x;
  s.target = EtaTarget::F;
  s.value = std::log(fx) / lx;
  s.lower_bound = std::log(x / (lx - 1.0)) / lx;
  s.upper_bound = std::log(x / (lx - 1.1) + 1.0) / lx;
  return s;
}

// value = ln f'(x) / ln x, between -ln(M L(x)^2) / ln x and ln(0.51) / ln x.
inline EtaSample eta_fprime_sample(const SvFunction& fn, double x, double big_m) {
  if (!(x >= kFprimeFrom)) throw ThresholdError("eta_fprime_sample needs x >= 5");
  detail::check_within(fn, x);
  const double lx = std::log(x);
  const double l = nested_log_bound(x);
  EtaSample s;
  s.x = x;
  s.target = EtaTarget::Fprime;
  s.value = std::log(to_double(fn.derivative(from_double(x)))) / lx;
  s.lower_bound = -std::log(big_m * l * l) / lx;
  s.upper_bound = std::log(kFprimeCeiling) / lx;
  return s;
}

// value = ln(1 / (M sqrt(p) ln p)) / ln x with p = p_{pi(x)}. The upper
// entry carries ln(0.51) / ln x for comparison; nothing is asserted.
inline EtaSample rh_lower_sample(const PrimeTables& tables, double x, double big_m) {
  if (!(x >= kRhFrom)) throw ThresholdError("rh_lower_sample needs x >= 3");
  if (!(x <= static_cast<double>(tables.limit())))
    throw OutOfRangeError("x = " + std::to_string(x) + " exceeds sieve limit " + std::to_string(tables.limit()),
                          static_cast<std::uint64_t>(x));
  const auto p = static_cast<double>(tables.nth_prime(tables.pi_of(static_cast<std::uint64_t>(std::floor(x)))));
  const double lx = std::log(x);
  EtaSample s;
  s.x = x;
  s.target = EtaTarget::RhLower;
  s.value = std::log(1.0 / (big_m * std::sqrt(p) * std::log(p))) / lx;
  s.lower_bound = s.value;
  s.upper_bound = std::log(kFprimeCeiling) / lx;
  return s;
}

// The lower bound 1 / (M ln^2 p_{pi(x)}) <= f'(x) <= 0.51 in linear scale.
struct FprimeSandwich {
  double x;
  double lower;
  double fprime;
  double upper;

  bool holds() const noexcept { return lower - kEtaSlack <= fprime && fprime <= upper + kEtaSlack; }
};

inline FprimeSandwich fprime_sandwich(const SvFunction& fn, double x, double big_m) {
  if (!(x >= kFprimeFrom)) throw ThresholdError("f' sandwich needs x >= 5");
  detail::check_within(fn, x);
  const auto& tables = fn.tables();
  const double lp = std::log(static_cast<double>(tables.nth_prime(tables.pi_of(static_cast<std::uint64_t>(std::floor(x))))));
  return {x, 1.0 / (big_m * lp * lp), to_double(fn.derivative(from_double(x))), kFprimeCeiling};
}

// `points` samples on a geometric grid from x_lo to x_hi, ascending; the end
// points are hit exactly.
inline std::vector<double> geometric_grid(double x_lo, double x_hi, unsigned points) {
  if (points < 2) throw UsageError("a sweep needs at least two points");
  if (!(x_lo > 0 && x_lo < x_hi)) throw UsageError("sweep range must satisfy 0 < from < to");
  std::vector<double> xs(points);
  const double ratio = x_hi / x_lo;
  for (unsigned i = 0; i < points; ++i)
    xs[i] = x_lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(points - 1));
  xs.front() = x_lo;
  xs.back() = x_hi;
  return xs;
}

inline EtaSample eta_sample(const SvFunction& fn, EtaTarget target, double x, double big_m) {
  switch (target) {
    case EtaTarget::F: return eta_f_sample(fn, x);
    case EtaTarget::Fprime: return eta_fprime_sample(fn, x, big_m);
    case EtaTarget::RhLower: return rh_lower_sample(fn.tables(), x, big_m);
  }
  throw UsageError("unknown eta target");
}

inline std::vector<EtaSample> eta_sweep(const SvFunction& fn, EtaTarget target, double x_lo, double x_hi,
                                        unsigned points, double big_m) {
  std::vector<EtaSample> out;
  for (const double x : geometric_grid(x_lo, x_hi, points)) out.push_back(eta_sample(fn, target, x, big_m));
  return out;
}

}  // namespace nlab
