#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stylized {

inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;
inline constexpr std::int64_t kNanosPerMinute = 60 * kNanosPerSecond;
inline constexpr std::int64_t kNanosPerHour = 60 * kNanosPerMinute;
inline constexpr std::int64_t kNanosPerDay = 24 * kNanosPerHour;

/// Civil date as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

  static Date from_ymd(int year, unsigned month, unsigned day);
  /// Parses `YYYY-MM-DD` or `YYYYMMDD`; throws std::invalid_argument.
  static Date parse(std::string_view text);

  /// YYYYMMDD as an integer, e.g. 20181018.
  [[nodiscard]] std::int32_t yyyymmdd() const;
  [[nodiscard]] std::string iso() const;
  /// 0 = Sunday ... 6 = Saturday.
  [[nodiscard]] unsigned weekday() const;
};

enum class TimeZoneRule {
  utc,         // fixed offset given by SessionCalendar::utc_offset_ns
  us_eastern,  // EST/EDT with the post-2007 DST rule
};

/// Offset (local - UTC) in nanoseconds for a UTC instant.
std::int64_t utc_offset_at(TimeZoneRule rule, std::int64_t fixed_offset_ns, std::int64_t utc_ns);

/// Trading session: a half-open time-of-day window on a set of trading days.
struct SessionCalendar {
  std::int64_t session_open_ns = 9 * kNanosPerHour + 30 * kNanosPerMinute;
  std::int64_t session_close_ns = 16 * kNanosPerHour;
  TimeZoneRule zone = TimeZoneRule::us_eastern;
  std::int64_t utc_offset_ns = 0;
  /// Strictly increasing. Empty means every date that carries trades.
  std::vector<Date> trading_days;

  [[nodiscard]] std::int64_t session_length_ns() const { return session_close_ns - session_open_ns; }

  /// Local date and nanoseconds since local midnight.
  struct LocalTime {
    Date date;
    std::int64_t time_of_day_ns = 0;
  };
  [[nodiscard]] LocalTime to_local(std::int64_t utc_ns) const;
  /// Inverse of to_local for instants away from DST transitions.
  [[nodiscard]] std::int64_t to_utc(Date date, std::int64_t time_of_day_ns) const;

  [[nodiscard]] bool is_trading_day(Date d) const;
  [[nodiscard]] bool in_session(std::int64_t utc_ns) const;

  /// Throws std::invalid_argument when open >= close or days are not increasing.
  void validate() const;
};

/// Consecutive weekdays starting at `first` (holidays are not modelled).
std::vector<Date> weekdays_from(Date first, std::size_t count);

/// Parses `HH:MM[:SS[.fff]]` into nanoseconds since midnight.
std::int64_t parse_time_of_day(std::string_view text);
std::string format_time_of_day(std::int64_t ns);

}  // namespace stylized
