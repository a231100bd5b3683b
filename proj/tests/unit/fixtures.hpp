#pragma once

#include <cstdint>
#include <vector>

#include "stylized/calendar.hpp"
#include "stylized/series.hpp"
#include "stylized/tape.hpp"

namespace fixtures {

using namespace stylized;

inline const Date kDay = Date::from_ymd(2018, 10, 18);  // a Thursday, EDT

inline SessionCalendar eastern() { return SessionCalendar{}; }

inline std::int64_t at(Date d, int h, int m, double s = 0.0) {
  const auto tod = h * kNanosPerHour + m * kNanosPerMinute + static_cast<std::int64_t>(s * 1e9);
  return eastern().to_utc(d, tod);
}

inline Trade trade(std::int64_t ts, double price, std::int64_t size = 100) {
  Trade t;
  t.ts_ns = ts;
  t.price = price;
  t.size = size;
  return t;
}

// One trade per second from 09:30:00 with the given prices.
inline SymbolTape seconds_tape(const std::vector<double>& prices, Date d = kDay, const char* symbol = "T") {
  SymbolTape tape{symbol, {}};
  for (std::size_t i = 0; i < prices.size(); ++i) {
    tape.trades.push_back(trade(at(d, 9, 30, static_cast<double>(i)), prices[i]));
  }
  return tape;
}

// Return series over explicit per-day values; NaN marks absent.
inline ReturnSeries returns(const std::vector<std::vector<double>>& days, ClockSpec clock = ClockSpec::event(1)) {
  ReturnSeries rs;
  rs.symbol = "T";
  rs.clock = clock;
  std::int32_t date = kDay.days;
  for (const auto& d : days) {
    rs.days.push_back({date++, rs.values.size(), d.size()});
    rs.values.insert(rs.values.end(), d.begin(), d.end());
  }
  return rs;
}

}  // namespace fixtures
