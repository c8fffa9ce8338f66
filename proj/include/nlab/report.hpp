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

// Text renderings of reports. CSV and JSON print doubles in shortest
// round-trip form; Markdown uses 6 significant digits.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlab/blocks.hpp"
#include "nlab/eta.hpp"
#include "nlab/svcheck.hpp"

namespace nlab {

enum class Format { Csv, Json, Md };

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  if (s == "md") return Format::Md;
  throw UsageError("unknown format '" + std::string(s) + "'");
}

inline std::string round_trip(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string six_significant(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return buf.data();
}

// Markdown rows for order-1 reports put digit 0 last: 1, 2, ..., g-1, 0.
inline std::vector<const FrequencyRow*> display_order(const FrequencyReport& r) {
  std::vector<const FrequencyRow*> rows;
  for (const auto& row : r.rows) rows.push_back(&row);
  if (r.order == 1 && !rows.empty() && rows.front()->block.digits == std::vector<Digit>{0})
    std::rotate(rows.begin(), rows.begin() + 1, rows.end());
  return rows;
}

inline nlohmann::ordered_json to_json(const FrequencyReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"block", row.block.to_string()}, {"count", row.count}, {"frequency", row.frequency}});
  return {{"base", r.base},
          {"order", r.order},
          {"denominator", r.denominator},
          {"rows", rows},
          {"max_deviation", r.max_deviation}};
}

inline void write_report(std::ostream& out, const FrequencyReport& r, Format fmt, const std::string& title = "Frequency") {
  switch (fmt) {
    case Format::Csv:
      out << "block,count,frequency\n";
      for (const auto& row : r.rows)
        out << row.block.to_string() << ',' << row.count << ',' << round_trip(row.frequency) << '\n';
      break;
    case Format::Json:
      out << to_json(r).dump(2) << '\n';
      break;
    case Format::Md:
      out << "| " << (r.order == 1 ? "Digit" : "Block") << " | " << title << " |\n|---|---|\n";
      for (const auto* row : display_order(r))
        out << "| " << row->block.to_string() << " | " << six_significant(row->frequency) << " |\n";
      out << "\nmax deviation: " << six_significant(r.max_deviation) << '\n';
      break;
  }
}

inline nlohmann::ordered_json to_json(const EtaSample& s) {
  return {{"x", s.x}, {"value", s.value}, {"lower", s.lower_bound}, {"upper", s.upper_bound},
          {"target", std::string(to_string(s.target))}};
}

inline void write_samples(std::ostream& out, const std::vector<EtaSample>& samples, Format fmt) {
  switch (fmt) {
    case Format::Csv:
      out << "x,value,lower,upper,target\n";
      for (const auto& s : samples)
        out << round_trip(s.x) << ',' << round_trip(s.value) << ',' << round_trip(s.lower_bound) << ','
            << round_trip(s.upper_bound) << ',' << to_string(s.target) << '\n';
      break;
    case Format::Json: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& s : samples) arr.push_back(to_json(s));
      out << arr.dump(2) << '\n';
      break;
    }
    case Format::Md:
      out << "| x | value | lower | upper |\n|---|---|---|---|\n";
      for (const auto& s : samples)
        out << "| " << six_significant(s.x) << " | " << six_significant(s.value) << " | "
            << six_significant(s.lower_bound) << " | " << six_significant(s.upper_bound) << " |\n";
      break;
  }
}

inline nlohmann::ordered_json to_json(const ConstructionReport& r, double big_m) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json j = {{"name", c.name},
                        {"status", c.passed() ? "pass" : "fail"},
                        {"evaluated", c.evaluated},
                        {"failures", c.failures}};
    if (c.first_failure)
      j["counterexample"] = {{"m", c.first_failure->m}, {"x", c.first_failure->x.get_str()},
                             {"detail", c.first_failure->detail}};
    else
      j["counterexample"] = nullptr;
    checks.push_back(std::move(j));
  }
  return {{"status", r.passed() ? "pass" : "fail"},
          {"m_max", r.m_max},
          {"samples", r.samples},
          {"seed", r.seed},
          {"eps", r.params.eps.get_str()},
          {"delta", r.params.delta.get_str()},
          {"big_m", big_m},
          {"checks", checks}};
}

}  // namespace nlab
