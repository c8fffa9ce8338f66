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
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlab/blocks.hpp"
#include "nlab/digits.hpp"
#include "nlab/eta.hpp"
#include "nlab/primes.hpp"
#include "nlab/report.hpp"
#include "nlab/sieve_cache.hpp"
#include "nlab/svcheck.hpp"
#include "nlab/svfun.hpp"

namespace nlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::uint64_t kDefaultLimit = 10'000'000;
inline constexpr std::uint64_t kLimitCap = 100'000'000;
inline constexpr std::uint64_t kTableEntries = 10'000'000;

// Upper bound for p_n (Rosser: p_n < n (ln n + ln ln n) for n >= 6).
inline std::uint64_t nth_prime_upper_bound(std::uint64_t n) {
  if (n < 6) return 13;
  const double x = static_cast<double>(n);
  return static_cast<std::uint64_t>(x * (std::log(x) + std::log(std::log(x)))) + 16;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string cache;
  unsigned threads = 1;

  // Sieve up to `limit`, going through the cache file when one is configured.
  PrimeTables tables(std::uint64_t limit) const {
    if (limit > kLimitCap)
      throw UsageError("required sieve limit " + std::to_string(limit) + " exceeds the cap of 10^8");
    std::optional<std::filesystem::path> path;
    if (!cache.empty()) path = cache;
    else if (const char* dir = std::getenv("NLAB_CACHE_DIR"); dir != nullptr && *dir != '\0')
      path = std::filesystem::path(dir) / ("sieve-" + std::to_string(limit) + ".nlab");
    if (path && std::filesystem::exists(*path)) {
      try {
        auto t = load_cache(*path);
        if (t.limit() == limit) return t;
      } catch (const CacheError& e) {
        err << "nlab: ignoring cache: " << e.what() << '\n';
      }
    }
    auto t = build_tables(limit, SieveOptions{.threads = threads});
    if (path) save_cache(t, *path);
    return t;
  }
};

// Sieve limit needed to produce entries [first, first + count) of a sequence.
inline std::uint64_t required_limit(SequenceKind kind, std::uint64_t first, std::uint64_t count) {
  const std::uint64_t last = first + count - 1;
  if (kind == SequenceKind::PrimeCount) return std::max<std::uint64_t>(last, 2);
  if (kind == SequenceKind::Primes) return nth_prime_upper_bound(last);
  return 0;
}

struct SeqArgs {
  std::string seq = "prime-count";
  unsigned base = 10;
  std::uint64_t start = 1;
  std::optional<std::uint64_t> limit;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seq", seq, "natural|square|floor-sqrt|primes|prime-count")->default_val(seq);
    cmd->add_option("--base", base, "digit base in [2, 36]")->default_val(base);
    cmd->add_option("--start", start, "first index, 0 or 1")->default_val(start);
    cmd->add_option("--limit", limit, "sieve limit (default 10^7, extended as needed up to 10^8)");
  }

  StreamSpec spec() const {
    StreamSpec s{parse_sequence_kind(seq), base, start, std::nullopt};
    s.validate();
    return s;
  }

  // With `exact` the entry count is known, so an over-cap request fails before any sieving;
  // digit-scoped callers only pass an upper estimate.
  std::optional<PrimeTables> tables(const Context& ctx, std::uint64_t entries_needed, bool exact = false) const {
    const auto kind = parse_sequence_kind(seq);
    if (!needs_tables(kind)) return std::nullopt;
    const std::uint64_t need = required_limit(kind, start, entries_needed);
    if (exact && need > kLimitCap)
      throw UsageError("entries need a sieve limit of " + std::to_string(need) + ", above the cap of 10^8");
    std::uint64_t lim = limit.value_or(kDefaultLimit);
    if (need > lim) lim = need;
    return ctx.tables(std::min(lim, kLimitCap));
  }
};

inline Format format_or(const std::string& fmt, Format fallback) { return fmt.empty() ? fallback : parse_format(fmt); }

inline int run_freq(const Context& ctx, const SeqArgs& seq, std::uint64_t entries, unsigned order, Format fmt) {
  if (entries == 0) throw UsageError("--entries must be positive");
  const auto spec = seq.spec();
  const auto tables = seq.tables(ctx, entries, true);
  const auto c = census(spec, order, EntryScope{entries}, tables ? &*tables : nullptr, {.threads = ctx.threads});
  const std::string title = "Frequency of a(n), " + std::string(to_string(spec.kind)) + ", n = " +
                            std::to_string(spec.start_index) + ".." + std::to_string(spec.start_index + entries - 1);
  write_report(ctx.out, frequency_report(c), fmt, title);
  return kExitOk;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nlab: digit statistics of concatenation constants and the pi(x) interpolation checks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format;
  std::string cache;
  unsigned threads = 1;
  app.add_option("--format", format, "csv|json|md")->check(CLI::IsMember({"csv", "json", "md"}));
  app.add_option("--cache", cache, "sieve cache file");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1U, 256U));

  // sieve
  auto* sieve_cmd = app.add_subcommand("sieve", "build (and cache) the prime tables");
  std::uint64_t sieve_limit = kDefaultLimit;
  sieve_cmd->add_option("--limit", sieve_limit, "inclusive upper bound")->required();

  // freq / table1 / table2
  auto* freq_cmd = app.add_subcommand("freq", "block frequencies over the first N entries");
  SeqArgs freq_seq;
  freq_seq.add_to(freq_cmd);
  std::uint64_t freq_entries = 0;
  unsigned freq_order = 1;
  freq_cmd->add_option("--entries", freq_entries, "number of entries a(n)")->required();
  freq_cmd->add_option("--order", freq_order, "block length k")->default_val(1);

  auto* table1_cmd = app.add_subcommand("table1", "digit frequencies of pi(n), n = 0..10^7-1");
  auto* table2_cmd = app.add_subcommand("table2", "digit frequencies of floor(sqrt n), n = 1..10^7");

  // blocks
  auto* blocks_cmd = app.add_subcommand("blocks", "block census over the first D digits");
  SeqArgs blocks_seq;
  blocks_seq.add_to(blocks_cmd);
  unsigned blocks_order = 1;
  std::uint64_t blocks_digits = 0;
  blocks_cmd->add_option("--order", blocks_order, "block length k")->default_val(1);
  blocks_cmd->add_option("--digits", blocks_digits, "number of digits scanned")->required();

  // benford
  auto* benford_cmd = app.add_subcommand("benford", "leading-digit frequencies of a(n)");
  SeqArgs benford_seq;
  benford_seq.add_to(benford_cmd);
  std::uint64_t benford_entries = 0;
  benford_cmd->add_option("--entries", benford_entries, "number of entries a(n)")->required();

  // dump
  auto* dump_cmd = app.add_subcommand("dump", "write the digit string");
  SeqArgs dump_seq;
  dump_seq.add_to(dump_cmd);
  std::optional<std::uint64_t> dump_entries;
  std::optional<std::uint64_t> dump_digits;
  bool dump_header = false;
  auto* dump_entries_opt = dump_cmd->add_option("--entries", dump_entries, "number of entries a(n)");
  dump_cmd->add_option("--digits", dump_digits, "number of digits")->excludes(dump_entries_opt);
  dump_cmd->add_flag("--header", dump_header, "prefix '# kind base start entries'");

  // svcheck
  auto* svcheck_cmd = app.add_subcommand("svcheck", "certify the interpolating function");
  std::uint64_t mmax = 1000;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 42;
  std::string eps_text = "1/25";
  std::string delta_text = "1/25";
  std::optional<std::uint64_t> inject;
  svcheck_cmd->add_option("--mmax", mmax, "last interval index")->default_val(mmax);
  svcheck_cmd->add_option("--samples", samples, "random sample points")->default_val(samples);
  svcheck_cmd->add_option("--seed", seed, "sampler seed")->default_val(seed);
  svcheck_cmd->add_option("--eps", eps_text, "knot offset on growing-gap intervals")->default_val(eps_text);
  svcheck_cmd->add_option("--delta", delta_text, "knot offset on shrinking-gap intervals")->default_val(delta_text);
  svcheck_cmd->add_option("--inject-fault", inject, "set the knot value of interval M to 1/g_M (test hook)");

  // eta
  auto* eta_cmd = app.add_subcommand("eta", "sample log-ratios of f, f' and the RH bound");
  std::string target_text = "f";
  double eta_from = 0;
  double eta_to = 0;
  unsigned eta_points = 10;
  std::string big_m_text = "auto";
  eta_cmd->add_option("--target", target_text, "f|fprime|rh")->default_val(target_text);
  eta_cmd->add_option("--from", eta_from, "first x")->required();
  eta_cmd->add_option("--to", eta_to, "last x")->required();
  eta_cmd->add_option("--points", eta_points, "grid size")->default_val(eta_points);
  eta_cmd->add_option("--big-m", big_m_text, "auto or a positive number")->default_val(big_m_text);
  eta_cmd->add_option("--eps", eps_text, "knot offset on growing-gap intervals")->default_val(eps_text);
  eta_cmd->add_option("--delta", delta_text, "knot offset on shrinking-gap intervals")->default_val(delta_text);

  // cramer
  auto* cramer_cmd = app.add_subcommand("cramer", "maximal g_m / ln^2 p_m");
  std::uint64_t cramer_limit = 1'000'000;
  std::uint64_t cramer_from = 1;
  cramer_cmd->add_option("--limit", cramer_limit, "sieve limit")->required();
  cramer_cmd->add_option("--from-m", cramer_from, "first gap index")->default_val(cramer_from);

  // dusart
  auto* dusart_cmd = app.add_subcommand("dusart", "check the explicit pi(x) bounds on a range");
  std::uint64_t dusart_from = 2;
  std::uint64_t dusart_to = 0;
  dusart_cmd->add_option("--from", dusart_from, "first x")->default_val(dusart_from);
  dusart_cmd->add_option("--to", dusart_to, "last x")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nlab: " << e.what() << '\n';
    return kExitUsage;
  }

  Context ctx{out, err, cache, threads};
  try {
    if (sieve_cmd->parsed()) {
      const auto t = ctx.tables(sieve_limit);
      const auto fmt = format_or(format, Format::Json);
      if (fmt == Format::Csv) {
        out << "limit,prime_count,largest_prime\n" << t.limit() << ',' << t.prime_count() << ',' << t.largest_prime() << '\n';
      } else if (fmt == Format::Md) {
        out << "| limit | pi(limit) | largest prime |\n|---|---|---|\n| " << t.limit() << " | " << t.prime_count()
            << " | " << t.largest_prime() << " |\n";
      } else {
        out << nlohmann::ordered_json{{"limit", t.limit()}, {"prime_count", t.prime_count()}, {"largest_prime", t.largest_prime()}}.dump(2)
            << '\n';
      }
      return kExitOk;
    }
    if (freq_cmd->parsed()) return run_freq(ctx, freq_seq, freq_entries, freq_order, format_or(format, Format::Md));
    if (table1_cmd->parsed()) {
      SeqArgs preset;
      preset.seq = "prime-count";
      preset.start = 0;
      return run_freq(ctx, preset, kTableEntries, 1, format_or(format, Format::Md));
    }
    if (table2_cmd->parsed()) {
      SeqArgs preset;
      preset.seq = "floor-sqrt";
      preset.start = 1;
      return run_freq(ctx, preset, kTableEntries, 1, format_or(format, Format::Md));
    }
    if (blocks_cmd->parsed()) {
      if (blocks_digits == 0) throw UsageError("--digits must be positive");
      const auto spec = blocks_seq.spec();
      const auto tables = blocks_seq.tables(ctx, blocks_digits);
      const auto c = census(spec, blocks_order, DigitScope{blocks_digits}, tables ? &*tables : nullptr,
                            {.threads = ctx.threads});
      write_report(out, frequency_report(c), format_or(format, Format::Md));
      return kExitOk;
    }
    if (benford_cmd->parsed()) {
      const auto spec = benford_seq.spec();
      const auto tables = benford_seq.tables(ctx, std::max<std::uint64_t>(benford_entries, 1), true);
      write_report(out, benford_leading(spec, benford_entries, tables ? &*tables : nullptr),
                   format_or(format, Format::Md), "Leading-digit frequency");
      return kExitOk;
    }
    if (dump_cmd->parsed()) {
      if (!dump_entries && !dump_digits) throw UsageError("dump needs --entries or --digits");
      auto spec = dump_seq.spec();
      spec.entry_count = dump_entries;
      const auto tables = dump_seq.tables(ctx, dump_entries ? *dump_entries : *dump_digits, dump_entries.has_value());
      if (dump_header) out << nlab::dump_header(spec) << '\n';
      DigitStream stream(spec, tables ? &*tables : nullptr, spec.start_index, spec.entry_count, dump_digits);
      std::vector<Digit> buf(1 << 16);
      std::string line;
      for (std::size_t got; (got = stream.read(buf)) != 0;) {
        line.clear();
        for (std::size_t i = 0; i < got; ++i) line.push_back(digit_char(buf[i]));
        out << line;
      }
      out << '\n';
      return kExitOk;
    }
    if (svcheck_cmd->parsed()) {
      SvParams params{parse_rational(eps_text), parse_rational(delta_text)};
      params.validate();
      if (mmax < 2) throw UsageError("--mmax must be at least 2");
      const auto t = ctx.tables(std::max(nth_prime_upper_bound(mmax + 1), std::uint64_t{100}));
      SvFunction fn(t, params);
      if (inject) {
        if (*inject < 2 || *inject > mmax) throw UsageError("--inject-fault must name an interval in [2, mmax]");
        fn.override_mid(*inject, Rational(1, t.gap(*inject)));
      }
      const auto report = check_construction(fn, mmax, samples, seed);
      out << to_json(report, big_m_auto(t)).dump(2) << '\n';
      return report.passed() ? kExitOk : kExitViolation;
    }
    if (eta_cmd->parsed()) {
      const auto target = parse_eta_target(target_text);
      SvParams params{parse_rational(eps_text), parse_rational(delta_text)};
      params.validate();
      if (!(eta_from > 0 && eta_from < eta_to)) throw UsageError("need 0 < --from < --to");
      const auto t = ctx.tables(static_cast<std::uint64_t>(std::ceil(eta_to)) + 2000);
      double big_m = 0;
      if (big_m_text == "auto") {
        big_m = big_m_auto(t);
      } else {
        try {
          big_m = std::stod(big_m_text);
        } catch (const std::exception&) {
          throw UsageError("--big-m must be 'auto' or a number");
        }
        if (!(big_m > 0)) throw UsageError("--big-m must be positive");
      }
      SvFunction fn(t, params);
      const auto samples_out = eta_sweep(fn, target, eta_from, eta_to, eta_points, big_m);
      write_samples(out, samples_out, format_or(format, Format::Csv));
      if (target == EtaTarget::RhLower) return kExitOk;
      const bool ok = std::all_of(samples_out.begin(), samples_out.end(), [](const EtaSample& s) { return s.sandwiched(); });
      if (!ok) err << "nlab: sandwich violated\n";
      return ok ? kExitOk : kExitViolation;
    }
    if (cramer_cmd->parsed()) {
      const auto t = ctx.tables(cramer_limit);
      const auto stats = cramer_stats(t, cramer_from);
      if (stats.argmax_m == 0) throw UsageError("no sieved gap at or after --from-m");
      const auto p = t.nth_prime(stats.argmax_m);
      const auto g = t.gap(stats.argmax_m);
      const double big_m = std::max(2.2, 1.05 * stats.max_ratio);
      const auto fmt = format_or(format, Format::Json);
      if (fmt == Format::Csv) {
        out << "limit,argmax_m,p,gap,max_ratio,big_m\n"
            << t.limit() << ',' << stats.argmax_m << ',' << p << ',' << g << ',' << round_trip(stats.max_ratio) << ','
            << round_trip(big_m) << '\n';
      } else if (fmt == Format::Md) {
        out << "| limit | argmax m | p_m | g_m | max ratio | M |\n|---|---|---|---|---|---|\n| " << t.limit() << " | "
            << stats.argmax_m << " | " << p << " | " << g << " | " << six_significant(stats.max_ratio) << " | "
            << six_significant(big_m) << " |\n";
      } else {
        out << nlohmann::ordered_json{{"limit", t.limit()}, {"argmax_m", stats.argmax_m}, {"p", p}, {"gap", g},
                              {"max_ratio", stats.max_ratio}, {"big_m", big_m}}
                   .dump(2)
            << '\n';
      }
      return kExitOk;
    }
    if (dusart_cmd->parsed()) {
      const auto t = ctx.tables(std::max<std::uint64_t>(dusart_to, 2));
      const auto violations = dusart_check(t, dusart_from, dusart_to);
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& v : violations)
        arr.push_back({{"x", v.x}, {"bound", v.bound == DusartBound::Lower ? "lower" : "upper"}, {"pi", v.pi},
                       {"bound_value", v.bound_value}});
      out << nlohmann::ordered_json{{"from", dusart_from}, {"to", dusart_to}, {"violations", arr}}.dump(2) << '\n';
      return violations.empty() ? kExitOk : kExitViolation;
    }
  } catch (const ConsistencyError& e) {
    err << "nlab: internal inconsistency: " << e.what() << '\n';
    return kExitViolation;
  } catch (const std::exception& e) {
    err << "nlab: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace nlab::cli
