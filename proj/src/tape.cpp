#include "stylized/tape.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "stylized/stats.hpp"

namespace stylized {

namespace {

constexpr std::array<char, 8> kBinaryMagic{'S', 'T', 'Y', 'T', 'A', 'P', 'E', '1'};

// Splits at most kMaxFields comma-separated fields; returns the field count,
// or kMaxFields + 1 when the line has more.
constexpr std::size_t kMaxFields = 5;
using Fields = std::array<std::string_view, kMaxFields>;

std::size_t split_fields(std::string_view line, Fields& out) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (n == kMaxFields) return kMaxFields + 1;
    if (comma == std::string_view::npos) {
      out[n++] = line.substr(start);
      return n;
    }
    out[n++] = line.substr(start, comma - start);
    start = comma + 1;
  }
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

// Groups rows by symbol, tracking per-symbol ordering.
class TapeBuilder {
 public:
  explicit TapeBuilder(ParseReport& report) : report_(report) {}

  void add(std::string_view symbol, const Trade& t) {
    if (current_ == nullptr || current_symbol_ != symbol) {
      current_symbol_.assign(symbol);
      current_ = &groups_[current_symbol_];
    }
    if (!current_->empty() && t.ts_ns < current_->back().ts_ns) ++report_.out_of_order;
    current_->push_back(t);
    ++report_.accepted;
  }

  Tape finish() {
    Tape tape;
    tape.reserve(groups_.size());
    for (auto& [symbol, trades] : groups_) {
      std::stable_sort(trades.begin(), trades.end(),
                       [](const Trade& a, const Trade& b) { return a.ts_ns < b.ts_ns; });
      tape.push_back(SymbolTape{symbol, std::move(trades)});
    }
    return tape;
  }

 private:
  ParseReport& report_;
  std::map<std::string, std::vector<Trade>> groups_;
  std::string current_symbol_;
  std::vector<Trade>* current_ = nullptr;
};

ParsedTape parse_csv(std::istream& in) {
  ParsedTape result;
  std::string line;
  if (!std::getline(in, line)) return result;  // empty stream: empty tape
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool has_cond = false;
  if (line == "symbol,ts_ns,price,size") {
    has_cond = false;
  } else if (line == "symbol,ts_ns,price,size,cond") {
    has_cond = true;
  } else {
    throw FormatError("unrecognised tape header: '" + line + "'");
  }

  ParseReport& report = result.report;
  TapeBuilder builder(report);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++report.rows;
    Fields fields;
    const std::size_t nfields = split_fields(line, fields);
    if (nfields != 4 && !(has_cond && nfields == 5)) {
      ++report.malformed;
      continue;
    }
    Trade t;
    if (fields[0].empty() || !parse_number(fields[1], t.ts_ns) || !parse_number(fields[2], t.price) ||
        !parse_number(fields[3], t.size)) {
      ++report.malformed;
      continue;
    }
    if (nfields == 5) {
      if (fields[4].size() > 1) {
        ++report.malformed;
        continue;
      }
      t.cond = fields[4].empty() ? '\0' : fields[4][0];
    }
    if (!(t.price > 0.0) || !std::isfinite(t.price) || t.size < 1) {
      ++report.rejected;
      continue;
    }
    builder.add(fields[0], t);
  }
  result.tape = builder.finish();
  return result;
}

template <class T>
void put(std::string& buf, const T& v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <class T>
T get(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

// Record payload: u16 symbol length, symbol bytes, i64 ts, f64 price, i64 size, u8 cond.
constexpr std::size_t kFixedPayload = sizeof(std::uint16_t) + 8 + 8 + 8 + 1;

ParsedTape parse_binary(std::istream& in) {
  ParsedTape result;
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() == 0) return result;
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kBinaryMagic) {
    throw FormatError("missing binary tape magic");
  }
  ParseReport& report = result.report;
  TapeBuilder builder(report);
  std::string payload;
  while (true) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (in.gcount() == 0) break;
    if (in.gcount() != sizeof len) throw FormatError("truncated record length");
    payload.resize(len);
    in.read(payload.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len)) throw FormatError("truncated record");
    ++report.rows;
    if (len < kFixedPayload) {
      ++report.malformed;
      continue;
    }
    const char* p = payload.data();
    const auto sym_len = get<std::uint16_t>(p);
    if (len != kFixedPayload + sym_len || sym_len == 0) {
      ++report.malformed;
      continue;
    }
    const std::string_view symbol(p, sym_len);
    p += sym_len;
    Trade t;
    t.ts_ns = get<std::int64_t>(p);
    t.price = get<double>(p);
    t.size = get<std::int64_t>(p);
    t.cond = get<char>(p);
    if (!(t.price > 0.0) || !std::isfinite(t.price) || t.size < 1) {
      ++report.rejected;
      continue;
    }
    builder.add(symbol, t);
  }
  result.tape = builder.finish();
  return result;
}

void append_number(std::string& out, auto v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

}  // namespace

ParsedTape parse_tape(std::istream& in, TapeFormat format) {
  return format == TapeFormat::csv ? parse_csv(in) : parse_binary(in);
}

ParsedTape read_tape_file(const std::string& path, TapeFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tape file: " + path);
  return parse_tape(in, format);
}

void write_tape(std::ostream& out, const Tape& tape, TapeFormat format) {
  std::string buf;
  auto flush = [&] {
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  };
  if (format == TapeFormat::csv) {
    const bool any_cond = std::any_of(tape.begin(), tape.end(), [](const SymbolTape& s) {
      return std::any_of(s.trades.begin(), s.trades.end(), [](const Trade& t) { return t.cond != '\0'; });
    });
    buf += any_cond ? "symbol,ts_ns,price,size,cond\n" : "symbol,ts_ns,price,size\n";
    for (const auto& sym : tape) {
      for (const auto& t : sym.trades) {
        buf += sym.symbol;
        buf += ',';
        append_number(buf, t.ts_ns);
        buf += ',';
        append_number(buf, t.price);
        buf += ',';
        append_number(buf, t.size);
        if (any_cond) {
          buf += ',';
          if (t.cond != '\0') buf += t.cond;
        }
        buf += '\n';
        if (buf.size() > (1u << 20)) flush();
      }
    }
  } else {
    buf.append(kBinaryMagic.data(), kBinaryMagic.size());
    for (const auto& sym : tape) {
      if (sym.symbol.empty() || sym.symbol.size() > 0xffff) throw std::invalid_argument("bad symbol length");
      const auto sym_len = static_cast<std::uint16_t>(sym.symbol.size());
      const auto len = static_cast<std::uint32_t>(kFixedPayload + sym_len);
      for (const auto& t : sym.trades) {
        put(buf, len);
        put(buf, sym_len);
        buf += sym.symbol;
        put(buf, t.ts_ns);
        put(buf, t.price);
        put(buf, t.size);
        put(buf, t.cond);
        if (buf.size() > (1u << 20)) flush();
      }
    }
  }
  flush();
}

void write_tape_file(const std::string& path, const Tape& tape, TapeFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write tape file: " + path);
  write_tape(out, tape, format);
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

bool in_filtered_session(const Trade& t, const SessionCalendar& calendar) {
  return t.cond != kAuctionCondition && calendar.in_session(t.ts_ns);
}

}  // namespace

std::vector<Trade> filter_session(const std::vector<Trade>& trades, const SessionCalendar& calendar) {
  std::vector<Trade> out;
  out.reserve(trades.size());
  for (const auto& t : trades) {
    if (in_filtered_session(t, calendar)) out.push_back(t);
  }
  return out;
}

std::size_t filter_session_in_place(std::vector<Trade>& trades, const SessionCalendar& calendar) {
  return std::erase_if(trades, [&](const Trade& t) { return !in_filtered_session(t, calendar); });
}

Tape filter_session(const Tape& tape, const SessionCalendar& calendar) {
  Tape out;
  out.reserve(tape.size());
  for (const auto& sym : tape) out.push_back(SymbolTape{sym.symbol, filter_session(sym.trades, calendar)});
  return out;
}

SymbolTapeStats tape_stats(const SymbolTape& tape, const SessionCalendar& calendar) {
  SymbolTapeStats st;
  st.symbol = tape.symbol;

  std::map<Date, std::int64_t> per_day;
  for (Date d : calendar.trading_days) per_day[d] = 0;
  std::vector<std::int64_t> gaps;
  gaps.reserve(tape.trades.size());
  Date prev_day{};
  std::int64_t prev_ts = 0;
  bool have_prev = false;
  for (const auto& t : tape.trades) {
    const Date d = calendar.to_local(t.ts_ns).date;
    ++per_day[d];
    if (have_prev && d == prev_day) gaps.push_back(t.ts_ns - prev_ts);
    prev_day = d;
    prev_ts = t.ts_ns;
    have_prev = true;
  }

  st.days = per_day.size();
  if (!per_day.empty()) {
    st.min_per_day = per_day.begin()->second;
    st.max_per_day = per_day.begin()->second;
    for (const auto& [day, n] : per_day) {
      st.total += n;
      st.min_per_day = std::min(st.min_per_day, n);
      st.max_per_day = std::max(st.max_per_day, n);
    }
    st.mean_per_day = static_cast<double>(st.total) / static_cast<double>(per_day.size());
  }

  if (!gaps.empty()) {
    InterarrivalStats ia;
    ia.samples = gaps.size();
    std::vector<double> as_double(gaps.begin(), gaps.end());
    ia.mean = stats::mean(as_double);
    ia.stddev = stats::stddev(as_double);
    const auto [mn, mx] = std::minmax_element(gaps.begin(), gaps.end());
    ia.min = *mn;
    ia.max = *mx;
    ia.median = stats::quantile(as_double, 0.5);
    st.interarrival = ia;
  }
  return st;
}

std::vector<SymbolTapeStats> tape_stats(const Tape& tape, const SessionCalendar& calendar) {
  std::vector<SymbolTapeStats> out;
  out.reserve(tape.size());
  for (const auto& sym : tape) out.push_back(tape_stats(sym, calendar));
  return out;
}

}  // namespace stylized
