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

// Differentiable interpolation f of the prime-counting function with
// floor(f(x)) = pi(x). Polynomial pieces cover [0, 3]; on each [p_m, p_{m+1}]
// (m >= 2) the derivative is a two-piece linear function h^(m) running from
// 1/g_{m-1} at p_m through a knot value at p_m + t to 1/g_m at p_{m+1}, with
// the knot value chosen so that h^(m) integrates to exactly 1.
//
// All arithmetic here is exact.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "nlab/error.hpp"
#include "nlab/primes.hpp"
#include "nlab/rational.hpp"

namespace nlab {

// Knot offsets used on every interval: eps where the gap grows, delta where it shrinks.
struct SvParams {
  Rational eps = make_rational(1, 25);
  Rational delta = make_rational(1, 25);

  void validate() const {
    if (eps <= 0 || eps >= 1) throw UsageError("eps must lie in (0, 1), got " + eps.get_str());
    if (delta <= 0 || delta >= 1) throw UsageError("delta must lie in (0, 1), got " + delta.get_str());
  }
};

// Eps: 1/g_{m-1} > 1/g_m. Delta: 1/g_{m-1} < 1/g_m. Null: equal gaps.
enum class IntervalCase { Eps, Delta, Null };

inline std::string_view to_string(IntervalCase c) {
  switch (c) {
    case IntervalCase::Eps: return "eps";
    case IntervalCase::Delta: return "delta";
    case IntervalCase::Null: return "null";
  }
  return "?";
}

struct SvCoefficients {
  std::uint64_t m = 0;
  std::uint64_t p_lo = 0;  // p_m
  std::uint64_t p_hi = 0;  // p_{m+1}
  std::uint64_t gap_prev = 0;  // g_{m-1}
  std::uint64_t gap = 0;       // g_m
  IntervalCase kind = IntervalCase::Null;
  Rational knot;  // p_m + eps (or + delta)
  Rational a;     // 1/g_{m-1}
  Rational b;     // 1/g_m
  Rational mid;   // h at the knot
};

namespace formulas {

// Knot value written directly in terms of the knot abscissa, growing-gap case.
inline Rational knot_value_raw_eps(std::uint64_t p, std::uint64_t g_prev, std::uint64_t g, const Rational& eps) {
  const Rational q1 = from_u64(p) + eps;
  const Rational gp = from_u64(g_prev);
  const Rational gm = from_u64(g);
  const Rational pm = from_u64(p);
  const Rational denom = gp * gm * gm;
  return Rational(q1 * (gp - gm) / denom) + Rational((gm * pm - gp * pm + gp * gm) / denom);
}

// Same for the shrinking-gap case; this form also involves p_{m+1}.
inline Rational knot_value_raw_delta(std::uint64_t p, std::uint64_t p_next, std::uint64_t g_prev, std::uint64_t g,
                                     const Rational& delta) {
  const Rational r1 = from_u64(p) + delta;
  const Rational gp = from_u64(g_prev);
  const Rational gm = from_u64(g);
  const Rational denom = gp * gm * gm;
  return Rational(r1 * (gp - gm) / denom) +
         Rational((gm * from_u64(p) - gp * from_u64(p_next) + 2 * gp * gm) / denom);
}

// Reduced form shared by both cases: t (1/g_m - 1/g_{m-1}) / g_m + 1/g_m.
inline Rational knot_value_reduced(std::uint64_t g_prev, std::uint64_t g, const Rational& t) {
  const Rational a(1, g_prev);
  const Rational b(1, g);
  return Rational(t * (b - a) / from_u64(g)) + b;
}

}  // namespace formulas

// Coefficients of h^(m) on [p_m, p_{m+1}], m >= 2. The knot value is taken
// from the reduced form and cross-checked against the raw form.
inline SvCoefficients interval_coeffs(const PrimeTables& tables, std::uint64_t m, const SvParams& params) {
  params.validate();
  if (m < 2) throw UsageError("interval index must be at least 2");
  if (m + 1 > tables.prime_count())
    throw OutOfRangeError("interval " + std::to_string(m) + " needs p_" + std::to_string(m + 1) + ", beyond the sieve", m);

  SvCoefficients c;
  c.m = m;
  c.p_lo = tables.nth_prime(m);
  c.p_hi = tables.nth_prime(m + 1);
  c.gap_prev = tables.gap(m - 1);
  c.gap = tables.gap(m);
  c.a = Rational(1, c.gap_prev);
  c.b = Rational(1, c.gap);

  if (c.gap_prev < c.gap) {
    c.kind = IntervalCase::Eps;
    if (params.eps >= Rational(1) / Rational(c.a - c.b))
      throw UsageError("eps too large for interval " + std::to_string(m));
    c.knot = from_u64(c.p_lo) + params.eps;
    c.mid = formulas::knot_value_reduced(c.gap_prev, c.gap, params.eps);
    if (formulas::knot_value_raw_eps(c.p_lo, c.gap_prev, c.gap, params.eps) != c.mid)
      throw ConsistencyError("raw and reduced knot values differ on eps interval " + std::to_string(m));
  } else if (c.gap_prev > c.gap) {
    c.kind = IntervalCase::Delta;
    c.knot = from_u64(c.p_lo) + params.delta;
    c.mid = formulas::knot_value_reduced(c.gap_prev, c.gap, params.delta);
    if (formulas::knot_value_raw_delta(c.p_lo, c.p_hi, c.gap_prev, c.gap, params.delta) != c.mid)
      throw ConsistencyError("raw and reduced knot values differ on delta interval " + std::to_string(m));
  } else {
    c.kind = IntervalCase::Null;
    c.knot = from_u64(c.p_lo) + params.eps;
    c.mid = c.b;
  }
  return c;
}

// The two line pieces of h^(m) in slope-intercept form. Neither checks its domain.
inline Rational h_left_piece(const SvCoefficients& c, const Rational& x) {
  if (c.kind == IntervalCase::Null) return c.b;
  const Rational gp = from_u64(c.gap_prev);
  const Rational p = from_u64(c.p_lo);
  const Rational denom = gp * (p - c.knot);
  const Rational slope = (1 - c.mid * gp) / denom;
  const Rational intercept = (c.mid * gp * p - c.knot) / denom;
  return slope * x + intercept;
}

inline Rational h_right_piece(const SvCoefficients& c, const Rational& x) {
  if (c.kind == IntervalCase::Null) return c.b;
  const Rational gm = from_u64(c.gap);
  const Rational p = from_u64(c.p_hi);
  const Rational denom = gm * (p - c.knot);
  const Rational slope = (1 - c.mid * gm) / denom;
  const Rational intercept = (c.mid * gm * p - c.knot) / denom;
  return slope * x + intercept;
}

inline Rational h_eval(const SvCoefficients& c, const Rational& x) {
  if (x < from_u64(c.p_lo) || x > from_u64(c.p_hi))
    throw DomainError("h^(" + std::to_string(c.m) + ") evaluated at " + x.get_str() + " outside [" +
                      std::to_string(c.p_lo) + ", " + std::to_string(c.p_hi) + "]");
  return x <= c.knot ? h_left_piece(c, x) : h_right_piece(c, x);
}

// Integral of h^(m) from p_m to x (x in [p_m, p_{m+1}]); trapezoids are exact
// on each linear piece.
inline Rational h_integral_to(const SvCoefficients& c, const Rational& x) {
  const Rational lo = from_u64(c.p_lo);
  const Rational hx = h_eval(c, x);
  if (x <= c.knot) return (x - lo) * (h_left_piece(c, lo) + hx) / 2;
  const Rational first = (c.knot - lo) * (h_left_piece(c, lo) + h_left_piece(c, c.knot)) / 2;
  return first + (x - c.knot) * (h_right_piece(c, c.knot) + hx) / 2;
}

// Integral of h^(m) over the whole interval; exactly 1 for valid coefficients.
inline Rational interval_integral(const SvCoefficients& c) { return h_integral_to(c, from_u64(c.p_hi)); }

// f together with a lazily filled, thread-safe cache of interval coefficients.
// The referenced tables must outlive the function.
class SvFunction {
 public:
  explicit SvFunction(const PrimeTables& tables, SvParams params = {}) : tables_(&tables), params_(std::move(params)) {
    params_.validate();
  }

  SvFunction(const SvFunction&) = delete;
  SvFunction& operator=(const SvFunction&) = delete;

  const PrimeTables& tables() const noexcept { return *tables_; }
  const SvParams& params() const noexcept { return params_; }

  // Largest sieved prime; f is evaluated exactly on [0, domain_end()].
  std::uint64_t domain_end() const noexcept { return tables_->largest_prime(); }

  const SvCoefficients& coefficients(std::uint64_t m) const {
    std::lock_guard lock(mu_);
    auto it = cache_.find(m);
    if (it == cache_.end()) {
      auto c = std::make_unique<SvCoefficients>(interval_coeffs(*tables_, m, params_));
      if (auto o = mid_overrides_.find(m); o != mid_overrides_.end()) c->mid = o->second;
      it = cache_.emplace(m, std::move(c)).first;
    }
    return *it->second;
  }

  // Replaces the knot value of interval m. Exists for fault-injection tests.
  void override_mid(std::uint64_t m, Rational mid) {
    std::lock_guard lock(mu_);
    cache_.erase(m);
    mid_overrides_[m] = std::move(mid);
  }

  // Index m with p_m <= x <= p_{m+1} for 3 <= x <= domain_end().
  std::uint64_t interval_of(const Rational& x) const {
    check_domain(x);
    if (x < 3) throw DomainError("no prime interval below 3");
    const auto whole = floor_of(x);
    const std::uint64_t m = tables_->pi_of(whole.get_ui());
    return m == tables_->prime_count() ? m - 1 : m;
  }

  Rational value(const Rational& x) const {
    check_domain(x);
    if (x <= Rational(3, 2)) return (4 * x * x + 12 * x + 39) / Rational(96);
    if (x <= 2) return (3 * x * x - 8 * x + 8) / Rational(4);
    if (x <= 3) return x - 1;
    const auto& c = coefficients(interval_of(x));
    return from_u64(c.m) + h_integral_to(c, x);
  }

  Rational derivative(const Rational& x) const {
    check_domain(x);
    if (x <= Rational(3, 2)) return (2 * x + 3) / Rational(24);
    if (x <= 2) return (6 * x - 8) / Rational(4);
    if (x <= 3) return Rational(1);
    return h_eval(coefficients(interval_of(x)), x);
  }

 private:
  void check_domain(const Rational& x) const {
    if (x < 0) throw DomainError("f is defined for x >= 0, got " + x.get_str());
    if (x > from_u64(domain_end()))
      throw DomainError("x = " + x.get_str() + " lies beyond the largest sieved prime " + std::to_string(domain_end()));
  }

  const PrimeTables* tables_;
  SvParams params_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<SvCoefficients>> cache_;
  std::map<std::uint64_t, Rational> mid_overrides_;
};

inline Rational f_eval(const SvFunction& fn, const Rational& x) { return fn.value(x); }
inline Rational f_prime_eval(const SvFunction& fn, const Rational& x) { return fn.derivative(x); }

}  // namespace nlab
