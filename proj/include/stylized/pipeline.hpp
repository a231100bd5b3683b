#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylized/battery.hpp"
#include "stylized/config.hpp"
#include "stylized/synth.hpp"
#include "stylized/tape.hpp"
#include "stylized/verdict.hpp"

namespace stylized {

/// Input that cannot be read: missing file, bad header, bad magic.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputReport {
  std::string source;  // file path or "synth:<symbol>"
  ParseReport parse;
};

struct LoadedInput {
  Tape tape;  // session-filtered, one entry per kept symbol
  SessionCalendar calendar;
  std::vector<InputReport> sources;
  std::vector<std::string> missing_symbols;  // requested but absent from every input
};

/// Reads tape files and generates synthetic symbols, then applies the symbol and session filters.
LoadedInput load_input(const RunConfig& config, std::ostream* log = nullptr);

/// Bands from the cache when present, else computed (and cached when a cache dir is set).
BandSet load_or_build_bands(const RunConfig& config, std::ostream* log = nullptr);
BandSet build_bands(const RunConfig& config);

struct Report {
  RunConfig config;
  std::string config_hash;
  std::vector<InputReport> sources;
  std::vector<std::string> missing_symbols;
  std::vector<SymbolTapeStats> tape_stats;
  std::vector<SymbolBattery> batteries;
  BandSet bands;
  std::vector<FactVerdict> verdicts;
};

/// Runs the battery on every symbol over config.workers threads. Throws
/// DataError for unreadable inputs and AnalyzerError for analyzer failures.
Report run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

/// Writes the report bundle into `dir` (created if needed).
void write_report(const Report& report, const std::filesystem::path& dir);

void write_bands_json(std::ostream& out, const BandSet& bands, const std::string& config_hash);
BandSet read_bands_json(std::istream& in);
void write_tape_stats_csv(std::ostream& out, const std::vector<SymbolTapeStats>& stats, const std::string& config_hash);

}  // namespace stylized
