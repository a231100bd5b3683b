#include "stylized/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace stylized {

namespace {

namespace chr = std::chrono;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Day number of the n-th Sunday (1-based) of a month.
std::int32_t nth_sunday(int year, unsigned month, unsigned n) {
  const chr::sys_days d{chr::year{year} / chr::month{month} / chr::Sunday[n]};
  return static_cast<std::int32_t>(d.time_since_epoch().count());
}

int year_of(std::int64_t utc_ns) {
  const chr::sys_days d{chr::days{floor_div(utc_ns, kNanosPerDay)}};
  return static_cast<int>(chr::year_month_day{d}.year());
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("bad " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
  return Date{static_cast<std::int32_t>(chr::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view text) {
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    return from_ymd(parse_int(text.substr(0, 4), "year"),
                    static_cast<unsigned>(parse_int(text.substr(5, 2), "month")),
                    static_cast<unsigned>(parse_int(text.substr(8, 2), "day")));
  }
  if (text.size() == 8) {
    return from_ymd(parse_int(text.substr(0, 4), "year"),
                    static_cast<unsigned>(parse_int(text.substr(4, 2), "month")),
                    static_cast<unsigned>(parse_int(text.substr(6, 2), "day")));
  }
  throw std::invalid_argument("bad date: '" + std::string(text) + "'");
}

std::int32_t Date::yyyymmdd() const {
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return static_cast<int>(ymd.year()) * 10000 + static_cast<int>(static_cast<unsigned>(ymd.month())) * 100 +
         static_cast<int>(static_cast<unsigned>(ymd.day()));
}

std::string Date::iso() const {
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

unsigned Date::weekday() const {
  return chr::weekday{chr::sys_days{chr::days{days}}}.c_encoding();
}

std::int64_t utc_offset_at(TimeZoneRule rule, std::int64_t fixed_offset_ns, std::int64_t utc_ns) {
  if (rule == TimeZoneRule::utc) return fixed_offset_ns;
  // DST runs from 02:00 EST on the second Sunday of March (07:00 UTC) to
  // 02:00 EDT on the first Sunday of November (06:00 UTC).
  const int year = year_of(utc_ns);
  const std::int64_t start = nth_sunday(year, 3, 2) * kNanosPerDay + 7 * kNanosPerHour;
  const std::int64_t end = nth_sunday(year, 11, 1) * kNanosPerDay + 6 * kNanosPerHour;
  const bool dst = utc_ns >= start && utc_ns < end;
  return dst ? -4 * kNanosPerHour : -5 * kNanosPerHour;
}

SessionCalendar::LocalTime SessionCalendar::to_local(std::int64_t utc_ns) const {
  const std::int64_t local = utc_ns + utc_offset_at(zone, utc_offset_ns, utc_ns);
  const std::int64_t day = floor_div(local, kNanosPerDay);
  return {Date{static_cast<std::int32_t>(day)}, local - day * kNanosPerDay};
}

std::int64_t SessionCalendar::to_utc(Date date, std::int64_t time_of_day_ns) const {
  const std::int64_t local = std::int64_t{date.days} * kNanosPerDay + time_of_day_ns;
  const std::int64_t guess = local - utc_offset_at(zone, utc_offset_ns, local);
  return local - utc_offset_at(zone, utc_offset_ns, guess);
}

bool SessionCalendar::is_trading_day(Date d) const {
  if (trading_days.empty()) return true;
  return std::binary_search(trading_days.begin(), trading_days.end(), d);
}

bool SessionCalendar::in_session(std::int64_t utc_ns) const {
  const auto lt = to_local(utc_ns);
  return lt.time_of_day_ns >= session_open_ns && lt.time_of_day_ns < session_close_ns &&
         is_trading_day(lt.date);
}

void SessionCalendar::validate() const {
  if (session_open_ns >= session_close_ns) {
    throw std::invalid_argument("session open must precede session close");
  }
  if (session_open_ns < 0 || session_close_ns > kNanosPerDay) {
    throw std::invalid_argument("session window must lie within one day");
  }
  for (std::size_t i = 1; i < trading_days.size(); ++i) {
    if (!(trading_days[i - 1] < trading_days[i])) {
      throw std::invalid_argument("trading days must be strictly increasing");
    }
  }
}

std::vector<Date> weekdays_from(Date first, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  for (Date d = first; out.size() < count; d.days += 1) {
    const unsigned wd = d.weekday();
    if (wd != 0 && wd != 6) out.push_back(d);
  }
  return out;
}

std::int64_t parse_time_of_day(std::string_view text) {
  // HH:MM[:SS[.fffffffff]]
  if (text.size() < 5 || text[2] != ':') throw std::invalid_argument("bad time of day: '" + std::string(text) + "'");
  std::int64_t ns = parse_int(text.substr(0, 2), "hour") * kNanosPerHour +
                    parse_int(text.substr(3, 2), "minute") * kNanosPerMinute;
  if (text.size() > 5) {
    if (text[5] != ':' || text.size() < 8) throw std::invalid_argument("bad time of day: '" + std::string(text) + "'");
    ns += parse_int(text.substr(6, 2), "second") * kNanosPerSecond;
    if (text.size() > 8) {
      if (text[8] != '.' || text.size() > 18) throw std::invalid_argument("bad time of day: '" + std::string(text) + "'");
      std::string frac(text.substr(9));
      frac.resize(9, '0');
      ns += parse_int(frac, "fraction");
    }
  }
  if (ns > kNanosPerDay) throw std::invalid_argument("time of day out of range");
  return ns;
}

std::string format_time_of_day(std::int64_t ns) {
  const auto h = ns / kNanosPerHour;
  const auto m = (ns % kNanosPerHour) / kNanosPerMinute;
  const auto s = (ns % kNanosPerMinute) / kNanosPerSecond;
  const auto f = ns % kNanosPerSecond;
  char buf[32];
  if (f == 0) {
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(h), static_cast<long long>(m),
                  static_cast<long long>(s));
  } else {
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld.%09lld", static_cast<long long>(h),
                  static_cast<long long>(m), static_cast<long long>(s), static_cast<long long>(f));
  }
  return buf;
}

}  // namespace stylized
