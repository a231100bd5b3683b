#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylized/calendar.hpp"

namespace stylized {

/// One reported trade. The symbol lives on the owning SymbolTape.
struct Trade {
  std::int64_t ts_ns = 0;  // nanoseconds since the Unix epoch (UTC)
  double price = 0.0;
  std::int64_t size = 0;
  char cond = '\0';  // '\0' = no condition code, 'A' = auction

  friend bool operator==(const Trade&, const Trade&) = default;
};

inline constexpr char kAuctionCondition = 'A';

struct SymbolTape {
  std::string symbol;
  std::vector<Trade> trades;  // sorted by ts_ns, ties in input order

  friend bool operator==(const SymbolTape&, const SymbolTape&) = default;
};

/// Per-symbol tapes ordered by symbol name.
using Tape = std::vector<SymbolTape>;

enum class TapeFormat { csv, binary };

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseReport {
  std::size_t rows = 0;
  std::size_t accepted = 0;
  std::size_t malformed = 0;     // wrong field count or unparsable field
  std::size_t rejected = 0;      // non-positive price or size
  std::size_t out_of_order = 0;  // rows whose ts precedes the previous row of the same symbol
};

struct ParsedTape {
  Tape tape;
  ParseReport report;
};

/// Reads a whole tape. Throws FormatError when the header or magic is unreadable.
ParsedTape parse_tape(std::istream& in, TapeFormat format);
ParsedTape read_tape_file(const std::string& path, TapeFormat format);

void write_tape(std::ostream& out, const Tape& tape, TapeFormat format);
void write_tape_file(const std::string& path, const Tape& tape, TapeFormat format);

/// Keeps trades inside [open, close) local time on trading days, minus auction prints.
std::vector<Trade> filter_session(const std::vector<Trade>& trades, const SessionCalendar& calendar);
Tape filter_session(const Tape& tape, const SessionCalendar& calendar);
/// Same rule without the copy; returns the number of trades removed.
std::size_t filter_session_in_place(std::vector<Trade>& trades, const SessionCalendar& calendar);

struct InterarrivalStats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::size_t samples = 0;
};

struct SymbolTapeStats {
  std::string symbol;
  std::size_t days = 0;
  double mean_per_day = 0.0;
  std::int64_t total = 0;
  std::int64_t max_per_day = 0;
  std::int64_t min_per_day = 0;
  /// Empty when no day holds two or more trades.
  std::optional<InterarrivalStats> interarrival;
};

SymbolTapeStats tape_stats(const SymbolTape& tape, const SessionCalendar& calendar);
std::vector<SymbolTapeStats> tape_stats(const Tape& tape, const SessionCalendar& calendar);

}  // namespace stylized
