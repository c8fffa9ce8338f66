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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nlab/rational.hpp"
#include "nlab/svfun.hpp"

namespace nlab {

struct Counterexample {
  std::uint64_t m = 0;  // 0 when x lies on the polynomial part
  Rational x;
  std::string detail;
};

struct CheckResult {
  std::string name;
  std::uint64_t evaluated = 0;
  std::uint64_t failures = 0;
  std::optional<Counterexample> first_failure;

  bool passed() const noexcept { return failures == 0; }
};

struct ConstructionReport {
  std::uint64_t m_max = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  SvParams params;
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }

  const CheckResult* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

class CheckTally {
 public:
  explicit CheckTally(std::string name) { result_.name = std::move(name); }

  void record(bool ok, std::uint64_t m, const Rational& x, const std::string& detail) {
    ++result_.evaluated;
    if (ok) return;
    ++result_.failures;
    if (!result_.first_failure) result_.first_failure = Counterexample{m, x, detail};
  }

  CheckResult take() { return std::move(result_); }

 private:
  CheckResult result_;
};

// Uniform-ish rational in [0, hi] with denominator in [1, 2^20]. Uses raw
// mt19937_64 output so the stream is identical on every standard library.
inline Rational sample_point(std::mt19937_64& rng, std::uint64_t hi) {
  const std::uint64_t den = 1 + rng() % (std::uint64_t{1} << 20);
  const std::uint64_t num = rng() % (hi * den + 1);
  Rational x(from_u64(num) / from_u64(den));
  return x;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 6> kConstructionChecks = {
    "floor_identity", "derivative_positive", "seam_continuity", "unit_integral", "derivative_bounds",
    "raw_reduced_equivalence"};

// Certifies the construction on [0, p_{m_max + 1}]:
//   floor_identity           floor(f(x)) == pi(x) at every sample
//   derivative_positive      f'(x) > 0 at every knot and sample
//   seam_continuity          f and f' agree from both sides at 3/2, 2, 3, each p_m and each knot
//   unit_integral            the integral of h^(m) is exactly 1 for 2 <= m <= m_max
//   derivative_bounds        growing gap: 0 < knot value <= f' <= 1/g_{m-1};
//                            shrinking gap: 0 < 1/g_{m-1} <= f' <= knot value;
//                            equal gaps: f' == 1/g_m; on [0, 3]: 1/8 <= f' <= 1
//   raw_reduced_equivalence  both printed knot-value forms agree exactly
inline ConstructionReport check_construction(const SvFunction& fn, std::uint64_t m_max, std::uint64_t sample_count,
                                             std::uint64_t seed) {
  const auto& tables = fn.tables();
  if (m_max < 2) throw UsageError("m_max must be at least 2");
  if (m_max + 1 > tables.prime_count())
    throw OutOfRangeError("m_max = " + std::to_string(m_max) + " needs p_" + std::to_string(m_max + 1) +
                              ", beyond the sieve (limit " + std::to_string(tables.limit()) + ")",
                          m_max);

  ConstructionReport report;
  report.m_max = m_max;
  report.samples = sample_count;
  report.seed = seed;
  report.params = fn.params();

  detail::CheckTally floor_id("floor_identity");
  detail::CheckTally positive("derivative_positive");
  detail::CheckTally seams("seam_continuity");
  detail::CheckTally unit("unit_integral");
  detail::CheckTally bounds("derivative_bounds");
  detail::CheckTally raw("raw_reduced_equivalence");

  const Rational three_halves(3, 2);
  const Rational two(2);
  const Rational three(3);

  // Polynomial seams: values and one-sided derivatives.
  auto poly_seam = [&](const Rational& x, const Rational& fl, const Rational& fr, const Rational& dl,
                       const Rational& dr) {
    seams.record(fl == fr, 0, x, "f jumps: " + fl.get_str() + " vs " + fr.get_str());
    seams.record(dl == dr, 0, x, "f' jumps: " + dl.get_str() + " vs " + dr.get_str());
  };
  poly_seam(three_halves, (4 * three_halves * three_halves + 12 * three_halves + 39) / Rational(96),
            (3 * three_halves * three_halves - 8 * three_halves + 8) / Rational(4), (2 * three_halves + 3) / Rational(24),
            (6 * three_halves - 8) / Rational(4));
  poly_seam(two, (3 * two * two - 8 * two + 8) / Rational(4), two - 1, (6 * two - 8) / Rational(4), Rational(1));
  {
    const auto& c2 = fn.coefficients(2);
    poly_seam(three, three - 1, from_u64(c2.m) + h_integral_to(c2, three), Rational(1), h_left_piece(c2, three));
  }

  for (std::uint64_t m = 2; m <= m_max; ++m) {
    const auto& c = fn.coefficients(m);
    const Rational lo = from_u64(c.p_lo);
    const Rational hi = from_u64(c.p_hi);

    // Endpoint values of h match the neighbouring gaps, and the pieces meet at the knot.
    seams.record(h_left_piece(c, lo) == c.a, m, lo, "h(p_m) != 1/g_{m-1}");
    seams.record(h_right_piece(c, hi) == c.b, m, hi, "h(p_{m+1}) != 1/g_m");
    seams.record(h_left_piece(c, c.knot) == h_right_piece(c, c.knot), m, c.knot, "pieces disagree at knot");
    if (m + 1 <= m_max) {
      const auto& next = fn.coefficients(m + 1);
      seams.record(h_right_piece(c, hi) == h_left_piece(next, hi), m, hi, "f' jumps at p_{m+1}");
    }

    const Rational integral = interval_integral(c);
    unit.record(integral == 1, m, hi, "integral = " + integral.get_str());

    const Rational at_knot = fn.derivative(c.knot);
    positive.record(at_knot > 0, m, c.knot, "f'(knot) = " + at_knot.get_str());

    if (c.kind == IntervalCase::Eps) {
      const Rational raw_mid = formulas::knot_value_raw_eps(c.p_lo, c.gap_prev, c.gap, fn.params().eps);
      const Rational red_mid = formulas::knot_value_reduced(c.gap_prev, c.gap, fn.params().eps);
      raw.record(raw_mid == red_mid, m, c.knot, "raw " + raw_mid.get_str() + " vs reduced " + red_mid.get_str());
      bounds.record(c.mid > 0 && c.mid < c.b, m, c.knot, "knot value not in (0, 1/g_m)");
    } else if (c.kind == IntervalCase::Delta) {
      const Rational raw_mid = formulas::knot_value_raw_delta(c.p_lo, c.p_hi, c.gap_prev, c.gap, fn.params().delta);
      const Rational red_mid = formulas::knot_value_reduced(c.gap_prev, c.gap, fn.params().delta);
      raw.record(raw_mid == red_mid, m, c.knot, "raw " + raw_mid.get_str() + " vs reduced " + red_mid.get_str());
      bounds.record(c.mid > c.b, m, c.knot, "knot value not above 1/g_m");
    } else {
      bounds.record(c.mid == c.a && c.a == c.b, m, c.knot, "null interval is not constant");
    }
  }

  std::mt19937_64 rng(seed);
  const std::uint64_t hi = tables.nth_prime(m_max + 1);
  for (std::uint64_t i = 0; i < sample_count; ++i) {
    const Rational x = detail::sample_point(rng, hi);
    const Rational fx = fn.value(x);
    const Rational dx = fn.derivative(x);
    const std::uint64_t pi = tables.pi_of(floor_of(x).get_ui());
    floor_id.record(floor_of(fx) == pi, x < 3 ? 0 : fn.interval_of(x), x,
                    "floor(f) = " + floor_of(fx).get_str() + ", pi = " + std::to_string(pi));
    positive.record(dx > 0, x < 3 ? 0 : fn.interval_of(x), x, "f' = " + dx.get_str());

    if (x <= 3) {
      bounds.record(dx >= Rational(1, 8) && dx <= 1, 0, x, "f' = " + dx.get_str() + " outside [1/8, 1]");
      continue;
    }
    const std::uint64_t m = fn.interval_of(x);
    const auto& c = fn.coefficients(m);
    bool ok = false;
    switch (c.kind) {
      case IntervalCase::Eps: ok = c.mid > 0 && c.mid <= dx && dx <= c.a; break;
      case IntervalCase::Delta: ok = c.a > 0 && c.a <= dx && dx <= c.mid; break;
      case IntervalCase::Null: ok = dx == c.b; break;
    }
    bounds.record(ok, m, x, "f' = " + dx.get_str() + " outside the " + std::string(to_string(c.kind)) + " bound chain");
  }

  report.checks.push_back(floor_id.take());
  report.checks.push_back(positive.take());
  report.checks.push_back(seams.take());
  report.checks.push_back(unit.take());
  report.checks.push_back(bounds.take());
  report.checks.push_back(raw.take());
  return report;
}

}  // namespace nlab
