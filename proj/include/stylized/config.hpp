#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylized/battery.hpp"
#include "stylized/calendar.hpp"
#include "stylized/synth.hpp"
#include "stylized/tape.hpp"
#include "stylized/verdict.hpp"

namespace stylized {

inline constexpr int kReportSchemaVersion = 1;

struct InputConfig {
  std::vector<std::string> tapes;
  TapeFormat format = TapeFormat::csv;
  std::vector<std::string> symbols;  // empty keeps every symbol
};

struct SynthConfig {
  bool enabled = false;
  GenSpec spec;
  std::size_t symbols = 1;  // symbol i is named spec.symbol + index and seeded spec.seed + i

  [[nodiscard]] std::vector<GenSpec> symbol_specs() const;
};

struct BandConfig {
  bool enabled = true;
  std::size_t replicates = 100;
  std::uint64_t seed = 42;
  std::size_t days = 103;
  std::size_t trades_per_day = 250'000;
  std::string cache_dir;  // empty disables the cache
};

struct RunConfig {
  InputConfig input;
  SessionCalendar calendar;
  SynthConfig synth;
  BatteryConfig battery;
  VerdictRules rules;
  BandConfig bands;
  std::size_t workers = 1;
  std::string output_dir;

  /// White-noise spec the bands are generated from.
  [[nodiscard]] GenSpec band_spec() const;
};

struct ConfigIssue {
  std::string key;
  std::string message;
};

struct ConfigResult {
  std::optional<RunConfig> config;
  std::vector<ConfigIssue> errors;
};

using ConfigOverride = std::pair<std::string, std::string>;

/// Parses INI text (`[section]` + `key = value`), applies `overrides` keyed
/// "section.key", fills defaults and checks every constraint. Returns either a
/// config or the full list of violations.
ConfigResult validate_config(std::string_view text, const std::vector<ConfigOverride>& overrides = {});

/// Every result-affecting key in a fixed order, `section.key = value` per line.
/// Worker count, output and cache locations are left out.
std::string canonical_config(const RunConfig& config);
/// FNV-1a 64 of canonical_config, as 16 hex digits.
std::string config_hash(const RunConfig& config);
/// Hash of the keys the noise bands depend on.
std::string band_cache_key(const RunConfig& config);
std::uint64_t fnv1a(std::string_view bytes);

/// All recognised keys, for help output.
std::vector<std::string> config_keys();

}  // namespace stylized
