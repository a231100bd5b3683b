#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "stylized/series.hpp"

using namespace stylized;
using fixtures::at;
using fixtures::kDay;
using fixtures::trade;

namespace {

bool same_values(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) != std::isnan(b[i])) return false;
    if (!std::isnan(a[i]) && a[i] != b[i]) return false;
  }
  return true;
}

SymbolTape random_tape(std::size_t days, std::size_t per_day, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> offset(0, 390 * kNanosPerMinute - 1);
  std::normal_distribution<double> z(0.0, 1e-3);
  SymbolTape tape{"R", {}};
  double log_p = std::log(50.0);
  const auto dates = weekdays_from(kDay, days);
  for (Date d : dates) {
    std::vector<std::int64_t> ts(per_day);
    for (auto& t : ts) t = offset(rng);
    std::sort(ts.begin(), ts.end());
    for (auto t : ts) {
      log_p += z(rng);
      tape.trades.push_back(trade(at(d, 9, 30) + t, std::exp(log_p), 1 + static_cast<std::int64_t>(rng() % 500)));
    }
  }
  return tape;
}

}  // namespace

TEST(ClockSeries, ForwardFillsBetweenTrades) {
  const SymbolTape tape{"T", {trade(at(kDay, 9, 30, 10), 100), trade(at(kDay, 9, 33, 20), 101)}};
  const auto ps = build_clock_series(tape, kNanosPerMinute, SessionCalendar{});
  ASSERT_EQ(ps.days.size(), 1u);
  ASSERT_EQ(ps.size(), 390u);
  // Labels are bucket end times: 09:31 is the first bucket.
  EXPECT_EQ(ps.label[0], 9 * kNanosPerHour + 31 * kNanosPerMinute);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(ps.log_price[i], std::log(100.0)) << i;
  EXPECT_DOUBLE_EQ(ps.log_price[3], std::log(101.0));
  EXPECT_DOUBLE_EQ(ps.log_price[389], std::log(101.0));
  EXPECT_EQ(ps.volume[1], 0);
  EXPECT_EQ(ps.trade_count[3], 1);

  const auto rs = log_returns(ps);
  EXPECT_TRUE(std::isnan(rs.values[0]));
  EXPECT_EQ(rs.values[1], 0.0);
  EXPECT_EQ(rs.values[2], 0.0);
  EXPECT_NEAR(rs.values[3], std::log(1.01), 1e-15);
}

TEST(ClockSeries, BucketsBeforeFirstTradeHaveNoPrice) {
  const SymbolTape tape{"T", {trade(at(kDay, 10, 0, 30), 100), trade(at(kDay, 10, 1, 30), 100)}};
  const auto ps = build_clock_series(tape, kNanosPerMinute, SessionCalendar{});
  EXPECT_FALSE(ps.has_price(29));
  EXPECT_TRUE(ps.has_price(30));
  const auto rs = log_returns(ps);
  EXPECT_EQ(rs.present_count(), 390u - 31u);
}

TEST(ClockSeries, BucketCountsDropTrailingPartial) {
  const auto tape = random_tape(2, 400, 5);
  for (int minutes : {1, 5, 10, 15, 20, 30, 50, 60, 390}) {
    const auto ps = build_clock_series(tape, minutes * kNanosPerMinute, SessionCalendar{});
    ASSERT_EQ(ps.days.size(), 2u);
    for (const auto& d : ps.days) EXPECT_EQ(d.count, static_cast<std::size_t>(390 / minutes)) << minutes;
  }
  const auto fifty = build_clock_series(tape, 50 * kNanosPerMinute, SessionCalendar{});
  EXPECT_EQ(fifty.label[fifty.days[0].count - 1], 9 * kNanosPerHour + 30 * kNanosPerMinute + 350 * kNanosPerMinute);
}

TEST(EventSeries, GroupsWithinEachDay) {
  std::vector<double> prices = {100, 101, 102, 103, 104, 105, 106};
  auto tape = fixtures::seconds_tape(prices);
  const auto n3 = build_event_series(tape, 3, SessionCalendar{});
  ASSERT_EQ(n3.size(), 2u);
  EXPECT_DOUBLE_EQ(n3.log_price[1], std::log(105.0));
  EXPECT_EQ(n3.volume[0], 300);

  const auto n1 = build_event_series(tape, 1, SessionCalendar{});
  ASSERT_EQ(n1.size(), prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) EXPECT_DOUBLE_EQ(n1.log_price[i], std::log(prices[i]));

  const auto n2 = build_event_series(fixtures::seconds_tape({100, 101, 102, 103}), 2, SessionCalendar{});
  ASSERT_EQ(n2.size(), 2u);
  EXPECT_DOUBLE_EQ(n2.log_price[0], std::log(101.0));
  EXPECT_DOUBLE_EQ(n2.log_price[1], std::log(103.0));
  EXPECT_DOUBLE_EQ(n2.open[1], 102.0);
  EXPECT_DOUBLE_EQ(n2.close[1], 103.0);
}

TEST(EventSeries, RestartsEachDayAndNeverCrossesTheBoundary) {
  auto tape = fixtures::seconds_tape({100, 101, 102});
  const auto d2 = fixtures::seconds_tape({200, 201, 202}, Date::from_ymd(2018, 10, 19));
  tape.trades.insert(tape.trades.end(), d2.trades.begin(), d2.trades.end());
  const auto ps = build_event_series(tape, 2, SessionCalendar{});
  ASSERT_EQ(ps.days.size(), 2u);
  EXPECT_EQ(ps.days[0].count, 1u);
  EXPECT_EQ(ps.days[1].count, 1u);
  const auto rs = log_returns(build_event_series(tape, 1, SessionCalendar{}));
  // Bucket 0 of day 2 must not hold the overnight move from 102 to 200.
  EXPECT_TRUE(std::isnan(rs.values[3]));
  EXPECT_EQ(rs.present_count(), 4u);
}

TEST(LogReturns, EventDaySumsTelescope) {
  const auto tape = random_tape(3, 3000, 8);
  for (std::int64_t n : {1, 7, 100}) {
    const auto ps = build_event_series(tape, n, SessionCalendar{});
    const auto rs = log_returns(ps);
    for (const auto& d : rs.days) {
      stats::CompensatedSum s;
      for (std::size_t i = 1; i < d.count; ++i) s += rs.values[d.offset + i];
      const double expected = ps.log_price[d.offset + d.count - 1] - ps.log_price[d.offset];
      EXPECT_NEAR(s.value(), expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(Normalize, DailyStddevMapsPlusMinusAToUnit) {
  const double a = 0.013;
  const auto tape = fixtures::seconds_tape({100, 100 * std::exp(a), 100});
  const auto rs = log_returns(build_event_series(tape, 1, SessionCalendar{}));
  const auto norm = normalize_returns(rs);
  EXPECT_EQ(norm.stage, ReturnStage::daily_normalized);
  EXPECT_NEAR(norm.values[1], 1.0, 1e-12);
  EXPECT_NEAR(norm.values[2], -1.0, 1e-12);
}

TEST(Normalize, EachDayHasUnitStddevInEventTime) {
  const auto tape = random_tape(4, 2000, 9);
  const auto norm = normalize_returns(log_returns(build_event_series(tape, 5, SessionCalendar{})));
  for (const auto& d : norm.days) {
    std::vector<double> v;
    for (std::size_t i = 0; i < d.count; ++i) {
      if (!std::isnan(norm.values[d.offset + i])) v.push_back(norm.values[d.offset + i]);
    }
    EXPECT_NEAR(stats::stddev(v), 1.0, 1e-9);
  }
}

TEST(Normalize, IdenticalDaysGiveUnitSlotScale) {
  const auto one = fixtures::returns({{std::nan(""), 0.01, -0.02, 0.005, 0.0, 0.03}}, ClockSpec::clock(kNanosPerMinute));
  auto three = fixtures::returns({one.values, one.values, one.values}, ClockSpec::clock(kNanosPerMinute));
  NormalizeReport report;
  const auto norm = normalize_returns(three, SlotScale::mean_abs, &report);
  EXPECT_EQ(norm.stage, ReturnStage::fully_normalized);
  // Slot 4 is zero on every day and cannot be scaled.
  EXPECT_EQ(report.dropped_slots, 1u);
  for (std::size_t slot : {1u, 2u, 3u, 5u}) {
    double mean_abs = 0.0;
    for (const auto& d : norm.days) mean_abs += std::abs(norm.values[d.offset + slot]) / 3.0;
    EXPECT_NEAR(mean_abs, 1.0, 1e-12) << slot;
  }
  EXPECT_TRUE(std::isnan(norm.values[4]));
}

TEST(Normalize, FlatDayIsDropped) {
  const auto rs = fixtures::returns({{std::nan(""), 0.0, 0.0}, {std::nan(""), 0.01, -0.01}});
  NormalizeReport report;
  const auto norm = normalize_returns(rs, SlotScale::mean_abs, &report);
  EXPECT_EQ(report.dropped_days, 1u);
  EXPECT_TRUE(std::isnan(norm.values[1]));
  EXPECT_NEAR(norm.values[5], -1.0, 1e-12);
}

TEST(Normalize, SignedMeanSwitchUsesSignedSlotAverage) {
  const auto rs = fixtures::returns({{std::nan(""), 1.0, -1.0}, {std::nan(""), 2.0, -2.0}},
                                    ClockSpec::clock(kNanosPerMinute));
  const auto abs_norm = normalize_returns(rs, SlotScale::mean_abs);
  const auto signed_norm = normalize_returns(rs, SlotScale::signed_mean);
  // Both days normalize to {+1, -1}; the signed slot means are +1 and -1.
  EXPECT_NEAR(abs_norm.values[2], -1.0, 1e-12);
  EXPECT_NEAR(signed_norm.values[2], 1.0, 1e-12);
}

TEST(Series, BuildersAreDeterministic) {
  const auto tape = random_tape(2, 5000, 10);
  for (ClockSpec c : {ClockSpec::clock(5 * kNanosPerMinute), ClockSpec::event(10)}) {
    const auto a = log_returns(build_series(tape, c, SessionCalendar{}));
    const auto b = log_returns(build_series(tape, c, SessionCalendar{}));
    EXPECT_TRUE(same_values(a.values, b.values));
    EXPECT_EQ(a.days, b.days);
  }
}

TEST(Series, ReverseAndNegate) {
  const auto rs = fixtures::returns({{std::nan(""), 1, 2, 3}});
  const auto neg = negate(rs);
  EXPECT_EQ(neg.values[3], -3.0);
  const auto rev = reverse_within_day(rs);
  EXPECT_EQ(rev.values[0], -3.0);
  EXPECT_EQ(rev.values[2], -1.0);
  EXPECT_TRUE(std::isnan(rev.values[3]));
}

TEST(ReturnsCsv, RoundTripsLosslessly) {
  const auto tape = random_tape(2, 300, 11);
  std::vector<ReturnSeries> all = {log_returns(build_series(tape, ClockSpec::clock(5 * kNanosPerMinute), {})),
                                   log_returns(build_series(tape, ClockSpec::event(3), {}))};
  std::stringstream buf;
  write_returns_csv(buf, all);
  const auto back = read_returns_csv(buf);
  ASSERT_EQ(back.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(back[i].symbol, all[i].symbol);
    EXPECT_EQ(back[i].clock, all[i].clock);
    EXPECT_EQ(back[i].stage, all[i].stage);
    EXPECT_EQ(back[i].days, all[i].days);
    EXPECT_TRUE(same_values(back[i].values, all[i].values));
  }
}

TEST(Duration, ParseAndLabel) {
  EXPECT_EQ(parse_duration("1min"), kNanosPerMinute);
  EXPECT_EQ(parse_duration("90s"), 90 * kNanosPerSecond);
  EXPECT_EQ(parse_duration("2h"), 2 * kNanosPerHour);
  EXPECT_EQ(ClockSpec::clock(30 * kNanosPerMinute).scale_label(), "30min");
  EXPECT_EQ(ClockSpec::event(2500).scale_label(), "2500");
  EXPECT_THROW(parse_duration("soon"), std::invalid_argument);
}
