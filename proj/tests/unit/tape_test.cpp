#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "stylized/tape.hpp"

using namespace stylized;
using fixtures::at;
using fixtures::kDay;
using fixtures::trade;

namespace {

ParsedTape parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_tape(in, TapeFormat::csv);
}

}  // namespace

TEST(ParseTape, MapsCsvFields) {
  const auto parsed = parse_csv("symbol,ts_ns,price,size\nAAPL,1539869400000000000,218.86,100\n");
  ASSERT_EQ(parsed.tape.size(), 1u);
  EXPECT_EQ(parsed.tape[0].symbol, "AAPL");
  ASSERT_EQ(parsed.tape[0].trades.size(), 1u);
  EXPECT_EQ(parsed.tape[0].trades[0], trade(1539869400000000000, 218.86, 100));
  EXPECT_EQ(parsed.report.rows, 1u);
  EXPECT_EQ(parsed.report.accepted, 1u);
}

TEST(ParseTape, EmptyStreamGivesEmptyTape) {
  const auto parsed = parse_csv("");
  EXPECT_TRUE(parsed.tape.empty());
  EXPECT_EQ(parsed.report.rows, 0u);
}

TEST(ParseTape, SortsSwappedTimestampsAndCountsThem) {
  const auto parsed = parse_csv("symbol,ts_ns,price,size\nX,2000,10,1\nX,1000,11,1\n");
  const auto& trades = parsed.tape.at(0).trades;
  std::vector<Trade> reference = {trade(2000, 10, 1), trade(1000, 11, 1)};
  std::stable_sort(reference.begin(), reference.end(), [](auto& a, auto& b) { return a.ts_ns < b.ts_ns; });
  EXPECT_EQ(trades, reference);
  EXPECT_EQ(parsed.report.out_of_order, 1u);
}

TEST(ParseTape, TiesKeepInputOrder) {
  const auto parsed = parse_csv("symbol,ts_ns,price,size\nX,5,1,1\nX,5,2,1\nX,5,3,1\n");
  const auto& t = parsed.tape.at(0).trades;
  EXPECT_EQ(t[0].price, 1);
  EXPECT_EQ(t[1].price, 2);
  EXPECT_EQ(t[2].price, 3);
  EXPECT_EQ(parsed.report.out_of_order, 0u);
}

TEST(ParseTape, RejectsNonPositiveAndCountsMalformed) {
  const auto parsed = parse_csv(
      "symbol,ts_ns,price,size\n"
      "X,1,-5,10\n"
      "X,2,5,0\n"
      "X,3,abc,10\n"
      "X,4,5\n"
      "X,5,5,10,A,extra\n"
      "X,6,5,10\n");
  EXPECT_EQ(parsed.report.rows, 6u);
  EXPECT_EQ(parsed.report.rejected, 2u);
  EXPECT_EQ(parsed.report.malformed, 3u);
  EXPECT_EQ(parsed.report.accepted, 1u);
}

TEST(ParseTape, UnreadableHeaderIsAFormatError) {
  EXPECT_THROW(parse_csv("sym,time,px\nX,1,2\n"), FormatError);
  std::istringstream bin("NOTATAPE");
  EXPECT_THROW(parse_tape(bin, TapeFormat::binary), FormatError);
}

TEST(ParseTape, GroupsBySymbolInNameOrder) {
  const auto parsed = parse_csv("symbol,ts_ns,price,size,cond\nMSFT,1,1,1,\nAAPL,2,1,1,A\nMSFT,3,1,1,\n");
  ASSERT_EQ(parsed.tape.size(), 2u);
  EXPECT_EQ(parsed.tape[0].symbol, "AAPL");
  EXPECT_EQ(parsed.tape[0].trades[0].cond, kAuctionCondition);
  EXPECT_EQ(parsed.tape[1].trades.size(), 2u);
}

TEST(WriteTape, CsvAndBinaryRoundTripLosslessly) {
  Tape tape = {{"AAA", {trade(1, 0.1 + 0.2, 3), trade(2, 218.86, 100), trade(2, 1e-7, 1)}},
               {"BBB", {trade(7, 123456.789, 5)}}};
  tape[0].trades[1].cond = 'A';
  for (auto fmt : {TapeFormat::csv, TapeFormat::binary}) {
    std::stringstream buf;
    write_tape(buf, tape, fmt);
    const auto back = parse_tape(buf, fmt);
    EXPECT_EQ(back.tape, tape);
    EXPECT_EQ(back.report.accepted, 4u);
  }
}

TEST(FilterSession, BoundaryRules) {
  const SessionCalendar cal;
  const std::vector<Trade> trades = {trade(at(kDay, 9, 29, 59.999), 1), trade(at(kDay, 9, 30), 1),
                                     trade(at(kDay, 15, 59, 59.999), 1), trade(at(kDay, 16, 0), 1)};
  const auto kept = filter_session(trades, cal);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].ts_ns, at(kDay, 9, 30));
}

TEST(FilterSession, TenTradesThreeAfterClose) {
  std::vector<Trade> trades;
  for (int i = 0; i < 7; ++i) trades.push_back(trade(at(kDay, 10, 10 * i), 1));
  for (int i = 0; i < 3; ++i) trades.push_back(trade(at(kDay, 16, 5 * i), 1));
  EXPECT_EQ(filter_session(trades, SessionCalendar{}).size(), 7u);
}

TEST(FilterSession, DropsAuctionPrintsAndIsIdempotent) {
  std::vector<Trade> trades = {trade(at(kDay, 9, 30), 1), trade(at(kDay, 10, 0), 1), trade(at(kDay, 20, 0), 1)};
  trades[0].cond = kAuctionCondition;
  const SessionCalendar cal;
  const auto once = filter_session(trades, cal);
  EXPECT_EQ(once.size(), 1u);
  EXPECT_EQ(filter_session(once, cal), once);
  auto in_place = trades;
  EXPECT_EQ(filter_session_in_place(in_place, cal), 2u);
  EXPECT_EQ(in_place, once);
}

TEST(TapeStats, InterarrivalsOfThreeTrades) {
  const auto t0 = at(kDay, 10, 0);
  const SymbolTape tape{"X", {trade(t0, 1), trade(t0 + 1000, 1), trade(t0 + 3000, 1)}};
  const auto st = tape_stats(tape, SessionCalendar{});
  ASSERT_TRUE(st.interarrival);
  EXPECT_EQ(st.interarrival->samples, 2u);
  EXPECT_DOUBLE_EQ(st.interarrival->median, 1500.0);
  EXPECT_DOUBLE_EQ(st.interarrival->mean, 1500.0);
  EXPECT_EQ(st.interarrival->min, 1000);
  EXPECT_EQ(st.interarrival->max, 2000);
}

TEST(TapeStats, SingleTradeHasNoInterarrivals) {
  const SymbolTape tape{"X", {trade(at(kDay, 10, 0), 1)}};
  const auto st = tape_stats(tape, SessionCalendar{});
  EXPECT_EQ(st.total, 1);
  EXPECT_FALSE(st.interarrival);
}

TEST(TapeStats, PerDayCountsAcrossDays) {
  const Date d2 = Date::from_ymd(2018, 10, 19);
  SymbolTape tape{"X", {}};
  for (int i = 0; i < 5; ++i) tape.trades.push_back(trade(at(kDay, 10, i), 1));
  for (int i = 0; i < 7; ++i) tape.trades.push_back(trade(at(d2, 10, i), 1));
  const auto st = tape_stats(tape, SessionCalendar{});
  EXPECT_EQ(st.days, 2u);
  EXPECT_DOUBLE_EQ(st.mean_per_day, 6.0);
  EXPECT_EQ(st.max_per_day, 7);
  EXPECT_EQ(st.min_per_day, 5);
  EXPECT_EQ(st.total, 12);
  // Gaps never cross the overnight boundary.
  EXPECT_EQ(st.interarrival->samples, 10u);
  EXPECT_EQ(st.interarrival->max, kNanosPerMinute);
}

TEST(TapeStats, ZeroTradeSymbolAndCalendarDays) {
  SessionCalendar cal;
  cal.trading_days = {kDay, Date::from_ymd(2018, 10, 19)};
  const auto empty = tape_stats(SymbolTape{"X", {}}, cal);
  EXPECT_EQ(empty.total, 0);
  EXPECT_EQ(empty.days, 2u);
  EXPECT_FALSE(empty.interarrival);
  const auto one_day = tape_stats(SymbolTape{"X", {trade(at(kDay, 10, 0), 1)}}, cal);
  EXPECT_EQ(one_day.min_per_day, 0);
  EXPECT_DOUBLE_EQ(one_day.mean_per_day, 0.5);
}

TEST(TapeStats, TotalMatchesFilteredLengthAndZeroGapIffDuplicate) {
  const auto t0 = at(kDay, 10, 0);
  Tape tape = {{"A", {trade(t0, 1), trade(t0, 1), trade(t0 + 5, 1), trade(at(kDay, 17, 0), 1)}},
               {"B", {trade(t0, 1), trade(t0 + 1, 1)}}};
  const SessionCalendar cal;
  const auto filtered = filter_session(tape, cal);
  const auto stats = tape_stats(filtered, cal);
  ASSERT_EQ(stats.size(), 2u);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    EXPECT_EQ(stats[i].total, static_cast<std::int64_t>(filtered[i].trades.size()));
  }
  EXPECT_EQ(stats[0].interarrival->min, 0);
  EXPECT_GT(stats[1].interarrival->min, 0);
}
