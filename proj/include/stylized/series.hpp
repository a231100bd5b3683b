#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stylized/calendar.hpp"
#include "stylized/stats.hpp"
#include "stylized/tape.hpp"

namespace stylized {

enum class ClockKind { clock, event };

/// Bucketing rule: wall-clock duration (ns) or trades per bucket.
struct ClockSpec {
  ClockKind kind = ClockKind::clock;
  std::int64_t scale = kNanosPerMinute;

  static ClockSpec clock(std::int64_t duration_ns) { return {ClockKind::clock, duration_ns}; }
  static ClockSpec event(std::int64_t trades) { return {ClockKind::event, trades}; }

  friend auto operator<=>(const ClockSpec&, const ClockSpec&) = default;

  /// "1min", "30s", "1h" for clock; the bare trade count for event.
  [[nodiscard]] std::string scale_label() const;
  [[nodiscard]] const char* kind_label() const { return kind == ClockKind::clock ? "clock" : "event"; }
  /// Scale in natural plotting units: minutes (clock) or trades (event).
  [[nodiscard]] double natural_scale() const;
};

/// Parses "1min", "90s", "2h", "500ms", "250us" or a bare count of nanoseconds.
std::int64_t parse_duration(std::string_view text);
std::string format_duration(std::int64_t ns);

/// Last-trade prices per bucket, one contiguous block of buckets per day.
/// Buckets without a defined price (before a day's first trade) hold NaN.
struct PriceSeries {
  std::string symbol;
  ClockSpec clock;
  DayLayout days;
  std::vector<std::int64_t> label;  // end time-of-day (clock) or first trade offset (event)
  std::vector<double> log_price;
  std::vector<double> open, high, low, close;
  std::vector<std::int64_t> volume;       // shares
  std::vector<std::int64_t> trade_count;  // trades

  [[nodiscard]] std::size_t size() const { return log_price.size(); }
  [[nodiscard]] bool has_price(std::size_t i) const { return log_price[i] == log_price[i]; }
};

enum class ReturnStage { raw, daily_normalized, fully_normalized };
const char* to_string(ReturnStage stage);

/// Within-day log-returns laid out like the PriceSeries they came from:
/// value i is X(i) - X(i - 1), NaN where absent (bucket 0 of each day, gaps).
struct ReturnSeries {
  std::string symbol;
  ClockSpec clock;
  ReturnStage stage = ReturnStage::raw;
  DayLayout days;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  /// Present values in layout order.
  [[nodiscard]] std::vector<double> present() const;
  [[nodiscard]] std::size_t present_count() const;
};

/// Clock-time buckets of width `bucket_ns` over the session of each trading day.
/// A trailing partial bucket is dropped; empty buckets forward-fill the price.
PriceSeries build_clock_series(const SymbolTape& tape, std::int64_t bucket_ns, const SessionCalendar& calendar);

/// Event-time buckets of `trades_per_bucket` consecutive trades; restarts each day.
PriceSeries build_event_series(const SymbolTape& tape, std::int64_t trades_per_bucket,
                               const SessionCalendar& calendar);

PriceSeries build_series(const SymbolTape& tape, ClockSpec clock, const SessionCalendar& calendar);

ReturnSeries log_returns(const PriceSeries& series);

enum class SlotScale {
  mean_abs,     // v(t) = mean over days of |r'(t)|
  signed_mean,  // v(t) = mean over days of r'(t)
};

struct NormalizeReport {
  std::size_t dropped_days = 0;
  std::size_t dropped_slots = 0;
};

/// Divides each day by its return stddev, then (clock time only) each
/// time-of-day slot by its cross-day scale.
ReturnSeries normalize_returns(const ReturnSeries& rs, SlotScale slot_scale = SlotScale::mean_abs,
                               NormalizeReport* report = nullptr);

/// r -> -r, keeping the layout.
ReturnSeries negate(const ReturnSeries& rs);
/// Mirrors each day: slot i becomes slot (count - 1 - i), with sign flipped.
ReturnSeries reverse_within_day(const ReturnSeries& rs);

/// Values of `series` aligned to `layout` (used to line up volume with returns).
std::vector<double> volume_values(const PriceSeries& series, bool trade_count = false);

/// Long-form export: `symbol,clock_kind,scale,day,bucket,value`; absent values are empty.
void write_returns_csv(std::ostream& out, const std::vector<ReturnSeries>& series);
std::vector<ReturnSeries> read_returns_csv(std::istream& in);

}  // namespace stylized
