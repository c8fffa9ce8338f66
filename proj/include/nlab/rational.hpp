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

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "nlab/error.hpp"

namespace nlab {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational q(Integer(std::to_string(num)), Integer(std::to_string(den)));
  q.canonicalize();
  return q;
}

inline Rational from_u64(std::uint64_t v) { return Rational(Integer(std::to_string(v))); }

inline Integer floor_of(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

// Exact rational from "p/q", an integer, or a plain decimal such as "0.04".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  try {
    if (s.find('/') != std::string::npos) {
      Rational q(s);
      if (q.get_den() == 0) throw UsageError("zero denominator in '" + s + "'");
      q.canonicalize();
      return q;
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(Integer(s));
    const std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    if (frac.find_first_not_of("0123456789") != std::string::npos || frac.empty()) throw std::invalid_argument(s);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    const bool negative = !whole.empty() && whole[0] == '-';
    Integer w(whole);
    Integer f(frac);
    Rational q(negative ? Integer(w * scale - f) : Integer(w * scale + f), scale);
    q.canonicalize();
    return q;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("not a rational number: '" + s + "'");
  }
}

// Exact conversion; every finite double is a dyadic rational.
inline Rational from_double(double x) { return Rational(x); }

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace nlab
