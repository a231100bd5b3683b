#include "stylized/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace stylized {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DayTrades {
  Date date;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits a ts-sorted tape into per-day trade ranges on the calendar's days.
std::vector<DayTrades> split_days(const SymbolTape& tape, const SessionCalendar& calendar) {
  std::vector<DayTrades> observed;
  const auto& trades = tape.trades;
  for (std::size_t i = 0; i < trades.size(); ++i) {
    const Date d = calendar.to_local(trades[i].ts_ns).date;
    if (observed.empty() || observed.back().date != d) {
      if (!observed.empty() && d < observed.back().date) {
        throw std::invalid_argument("build series: trades of " + tape.symbol + " are not sorted by time");
      }
      observed.push_back({d, i, i});
    }
    observed.back().end = i + 1;
  }
  if (calendar.trading_days.empty()) return observed;

  std::vector<DayTrades> out;
  out.reserve(calendar.trading_days.size());
  auto it = observed.begin();
  for (Date d : calendar.trading_days) {
    while (it != observed.end() && it->date < d) ++it;
    if (it != observed.end() && it->date == d) {
      out.push_back(*it);
    } else {
      out.push_back({d, 0, 0});
    }
  }
  return out;
}

void reserve_all(PriceSeries& s, std::size_t n) {
  s.label.reserve(n);
  s.log_price.reserve(n);
  s.open.reserve(n);
  s.high.reserve(n);
  s.low.reserve(n);
  s.close.reserve(n);
  s.volume.reserve(n);
  s.trade_count.reserve(n);
}

void push_bucket(PriceSeries& s, std::int64_t label, double o, double h, double l, double c, std::int64_t vol,
                 std::int64_t count) {
  s.label.push_back(label);
  s.log_price.push_back(std::isnan(c) ? kNaN : std::log(c));
  s.open.push_back(o);
  s.high.push_back(h);
  s.low.push_back(l);
  s.close.push_back(c);
  s.volume.push_back(vol);
  s.trade_count.push_back(count);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_duration(std::int64_t ns) {
  struct Unit {
    std::int64_t size;
    const char* name;
  };
  static constexpr Unit units[] = {{kNanosPerHour, "h"},      {kNanosPerMinute, "min"}, {kNanosPerSecond, "s"},
                                   {1'000'000, "ms"},         {1'000, "us"},            {1, "ns"}};
  for (const auto& u : units) {
    if (ns != 0 && ns % u.size == 0) return std::to_string(ns / u.size) + u.name;
  }
  return std::to_string(ns) + "ns";
}

std::int64_t parse_duration(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p == text.data()) throw std::invalid_argument("bad duration: '" + std::string(text) + "'");
  const std::string_view unit(p, static_cast<std::size_t>(text.data() + text.size() - p));
  std::int64_t mult = 0;
  if (unit == "h") mult = kNanosPerHour;
  else if (unit == "min" || unit == "m") mult = kNanosPerMinute;
  else if (unit == "s") mult = kNanosPerSecond;
  else if (unit == "ms") mult = 1'000'000;
  else if (unit == "us") mult = 1'000;
  else if (unit == "ns") mult = 1;
  else throw std::invalid_argument("bad duration unit in '" + std::string(text) + "'");
  if (value <= 0) throw std::invalid_argument("duration must be positive: '" + std::string(text) + "'");
  return value * mult;
}

std::string ClockSpec::scale_label() const {
  return kind == ClockKind::clock ? format_duration(scale) : std::to_string(scale);
}

double ClockSpec::natural_scale() const {
  return kind == ClockKind::clock ? static_cast<double>(scale) / static_cast<double>(kNanosPerMinute)
                                  : static_cast<double>(scale);
}

const char* to_string(ReturnStage stage) {
  switch (stage) {
    case ReturnStage::raw: return "raw";
    case ReturnStage::daily_normalized: return "daily_normalized";
    case ReturnStage::fully_normalized: return "fully_normalized";
  }
  return "raw";
}

std::vector<double> ReturnSeries::present() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

std::size_t ReturnSeries::present_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !std::isnan(v); }));
}

PriceSeries build_clock_series(const SymbolTape& tape, std::int64_t bucket_ns, const SessionCalendar& calendar) {
  if (bucket_ns <= 0) throw std::invalid_argument("clock bucket width must be positive");
  const std::int64_t session = calendar.session_length_ns();
  const auto per_day = static_cast<std::size_t>(session / bucket_ns);
  if (per_day == 0) throw std::invalid_argument("clock bucket wider than the session");

  PriceSeries s;
  s.symbol = tape.symbol;
  s.clock = ClockSpec::clock(bucket_ns);
  const auto days = split_days(tape, calendar);
  reserve_all(s, days.size() * per_day);

  struct Acc {
    double o = kNaN, h = kNaN, l = kNaN, c = kNaN;
    std::int64_t vol = 0, count = 0;
  };
  std::vector<Acc> acc;
  for (const auto& day : days) {
    DaySpan span{day.date.days, s.size(), 0};
    if (day.begin == day.end) {
      s.days.push_back(span);
      continue;
    }
    acc.assign(per_day, Acc{});
    for (std::size_t i = day.begin; i < day.end; ++i) {
      const Trade& t = tape.trades[i];
      const std::int64_t tod = calendar.to_local(t.ts_ns).time_of_day_ns - calendar.session_open_ns;
      if (tod < 0 || tod >= session) continue;
      const auto b = static_cast<std::size_t>(tod / bucket_ns);
      if (b >= per_day) continue;  // trailing partial bucket
      Acc& a = acc[b];
      if (a.count == 0) {
        a.o = a.h = a.l = t.price;
      } else {
        a.h = std::max(a.h, t.price);
        a.l = std::min(a.l, t.price);
      }
      a.c = t.price;
      a.vol += t.size;
      ++a.count;
    }
    double last = kNaN;
    for (std::size_t b = 0; b < per_day; ++b) {
      const std::int64_t label = calendar.session_open_ns + static_cast<std::int64_t>(b + 1) * bucket_ns;
      const Acc& a = acc[b];
      if (a.count > 0) {
        push_bucket(s, label, a.o, a.h, a.l, a.c, a.vol, a.count);
        last = a.c;
      } else {
        push_bucket(s, label, last, last, last, last, 0, 0);
      }
    }
    span.count = per_day;
    s.days.push_back(span);
  }
  return s;
}

PriceSeries build_event_series(const SymbolTape& tape, std::int64_t trades_per_bucket,
                               const SessionCalendar& calendar) {
  if (trades_per_bucket <= 0) throw std::invalid_argument("event bucket size must be positive");
  const auto n = static_cast<std::size_t>(trades_per_bucket);
  PriceSeries s;
  s.symbol = tape.symbol;
  s.clock = ClockSpec::event(trades_per_bucket);
  const auto days = split_days(tape, calendar);
  reserve_all(s, tape.trades.size() / n + days.size());
  for (const auto& day : days) {
    DaySpan span{day.date.days, s.size(), 0};
    const std::size_t buckets = (day.end - day.begin) / n;
    for (std::size_t b = 0; b < buckets; ++b) {
      const std::size_t first = day.begin + b * n;
      double h = tape.trades[first].price;
      double l = h;
      std::int64_t vol = 0;
      for (std::size_t i = first; i < first + n; ++i) {
        h = std::max(h, tape.trades[i].price);
        l = std::min(l, tape.trades[i].price);
        vol += tape.trades[i].size;
      }
      push_bucket(s, static_cast<std::int64_t>(b * n), tape.trades[first].price, h, l,
                  tape.trades[first + n - 1].price, vol, trades_per_bucket);
    }
    span.count = buckets;
    s.days.push_back(span);
  }
  return s;
}

PriceSeries build_series(const SymbolTape& tape, ClockSpec clock, const SessionCalendar& calendar) {
  return clock.kind == ClockKind::clock ? build_clock_series(tape, clock.scale, calendar)
                                        : build_event_series(tape, clock.scale, calendar);
}

ReturnSeries log_returns(const PriceSeries& series) {
  ReturnSeries rs;
  rs.symbol = series.symbol;
  rs.clock = series.clock;
  rs.stage = ReturnStage::raw;
  rs.days = series.days;
  rs.values.assign(series.size(), kNaN);
  for (const auto& day : series.days) {
    for (std::size_t i = 1; i < day.count; ++i) {
      const std::size_t k = day.offset + i;
      rs.values[k] = series.log_price[k] - series.log_price[k - 1];  // NaN propagates
    }
  }
  return rs;
}

ReturnSeries normalize_returns(const ReturnSeries& rs, SlotScale slot_scale, NormalizeReport* report) {
  if (rs.stage != ReturnStage::raw) throw std::invalid_argument("normalize_returns expects raw returns");
  NormalizeReport local;
  ReturnSeries out = rs;
  out.stage = ReturnStage::daily_normalized;

  std::vector<double> day_values;
  for (const auto& day : out.days) {
    if (day.count == 0) continue;
    day_values.clear();
    for (std::size_t i = 0; i < day.count; ++i) {
      const double v = out.values[day.offset + i];
      if (!std::isnan(v)) day_values.push_back(v);
    }
    const double sigma = day_values.size() >= 2 ? stats::stddev(day_values) : 0.0;
    for (std::size_t i = 0; i < day.count; ++i) {
      double& v = out.values[day.offset + i];
      v = sigma > 0.0 ? v / sigma : kNaN;
    }
    if (!(sigma > 0.0)) ++local.dropped_days;
  }

  if (rs.clock.kind == ClockKind::clock) {
    out.stage = ReturnStage::fully_normalized;
    std::size_t slots = 0;
    for (const auto& day : out.days) slots = std::max(slots, day.count);
    std::vector<stats::CompensatedSum> sums(slots);
    std::vector<std::size_t> counts(slots, 0);
    for (const auto& day : out.days) {
      for (std::size_t i = 0; i < day.count; ++i) {
        const double v = out.values[day.offset + i];
        if (std::isnan(v)) continue;
        sums[i] += slot_scale == SlotScale::mean_abs ? std::abs(v) : v;
        ++counts[i];
      }
    }
    std::vector<double> scale(slots, kNaN);
    for (std::size_t i = 0; i < slots; ++i) {
      if (counts[i] == 0) continue;
      const double v = sums[i].value() / static_cast<double>(counts[i]);
      if (v != 0.0) {
        scale[i] = v;
      } else {
        ++local.dropped_slots;
      }
    }
    for (const auto& day : out.days) {
      for (std::size_t i = 0; i < day.count; ++i) {
        double& v = out.values[day.offset + i];
        v = std::isnan(scale[i]) ? kNaN : v / scale[i];
      }
    }
  }
  if (report) *report = local;
  return out;
}

ReturnSeries negate(const ReturnSeries& rs) {
  ReturnSeries out = rs;
  for (double& v : out.values) v = -v;
  return out;
}

ReturnSeries reverse_within_day(const ReturnSeries& rs) {
  ReturnSeries out = rs;
  for (const auto& day : rs.days) {
    for (std::size_t i = 0; i < day.count; ++i) {
      out.values[day.offset + i] = -rs.values[day.offset + day.count - 1 - i];
    }
  }
  return out;
}

std::vector<double> volume_values(const PriceSeries& series, bool trade_count) {
  std::vector<double> out(series.size(), kNaN);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.has_price(i)) continue;
    out[i] = static_cast<double>(trade_count ? series.trade_count[i] : series.volume[i]);
  }
  return out;
}

void write_returns_csv(std::ostream& out, const std::vector<ReturnSeries>& series) {
  if (!series.empty()) {
    for (const auto& s : series) {
      if (s.stage != series.front().stage) throw std::invalid_argument("write_returns_csv: mixed stages");
    }
    out << "# stage=" << to_string(series.front().stage) << '\n';
  }
  out << "symbol,clock_kind,scale,day,bucket,value\n";
  std::string line;
  char buf[32];
  for (const auto& s : series) {
    const std::string prefix = s.symbol + ',' + s.clock.kind_label() + ',' + s.clock.scale_label() + ',';
    for (const auto& day : s.days) {
      const std::string day_label = std::to_string(Date{day.date}.yyyymmdd());
      for (std::size_t i = 0; i < day.count; ++i) {
        line = prefix;
        line += day_label;
        line += ',';
        line += std::to_string(i);
        line += ',';
        const double v = s.values[day.offset + i];
        if (!std::isnan(v)) {
          auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
          line.append(buf, p);
        }
        line += '\n';
        out << line;
      }
    }
  }
}

std::vector<ReturnSeries> read_returns_csv(std::istream& in) {
  std::vector<ReturnSeries> out;
  ReturnStage stage = ReturnStage::raw;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("stage=");
      if (pos != std::string::npos) {
        const std::string name = line.substr(pos + 6, line.find(' ', pos) - pos - 6);
        if (name == "raw") stage = ReturnStage::raw;
        else if (name == "daily_normalized") stage = ReturnStage::daily_normalized;
        else if (name == "fully_normalized") stage = ReturnStage::fully_normalized;
        else throw FormatError("unknown return stage '" + name + "'");
      }
      continue;
    }
    if (!header) {
      if (line != "symbol,clock_kind,scale,day,bucket,value") throw FormatError("bad returns header: " + line);
      header = true;
      continue;
    }
    std::string_view f[6];
    std::string_view rest(line);
    for (int k = 0; k < 6; ++k) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (k == 5)) throw FormatError("bad returns row: " + line);
      f[k] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    ClockSpec clock;
    if (f[1] == "clock") {
      clock = ClockSpec::clock(parse_duration(f[2]));
    } else if (f[1] == "event") {
      std::int64_t n = 0;
      std::from_chars(f[2].data(), f[2].data() + f[2].size(), n);
      clock = ClockSpec::event(n);
    } else {
      throw FormatError("bad clock kind: " + line);
    }
    const Date date = Date::parse(f[3]);
    if (out.empty() || out.back().symbol != f[0] || out.back().clock != clock) {
      ReturnSeries rs;
      rs.symbol = std::string(f[0]);
      rs.clock = clock;
      rs.stage = stage;
      out.push_back(std::move(rs));
    }
    ReturnSeries& rs = out.back();
    if (rs.days.empty() || rs.days.back().date != date.days) {
      rs.days.push_back(DaySpan{date.days, rs.values.size(), 0});
    }
    double v = kNaN;
    if (!f[5].empty()) {
      auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), v);
      if (ec != std::errc{}) throw FormatError("bad return value: " + line);
    }
    rs.values.push_back(v);
    ++rs.days.back().count;
  }
  return out;
}

}  // namespace stylized
