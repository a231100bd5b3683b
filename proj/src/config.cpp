#include "stylized/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace stylized {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (item.empty()) throw std::invalid_argument("empty list item");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view text) {
  text = trim(text);
  T value{};
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t parse_size(std::string_view text) { return parse_number<std::size_t>(text); }

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("not a boolean: '" + std::string(text) + "'");
}

std::string fmt_double(double v) {
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& xs) {
  return join<std::string>(xs, [](const std::string& s) { return s; });
}

template <class Enum>
Enum parse_enum(std::string_view text, std::initializer_list<std::pair<const char*, Enum>> names) {
  text = trim(text);
  std::string known;
  for (const auto& [name, value] : names) {
    if (text == name) return value;
    known += known.empty() ? "" : "|";
    known += name;
  }
  throw std::invalid_argument("expected one of " + known + ", got '" + std::string(text) + "'");
}

template <class Enum>
std::string enum_name(Enum value, std::initializer_list<std::pair<const char*, Enum>> names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

const std::initializer_list<std::pair<const char*, TapeFormat>> kFormats{{"csv", TapeFormat::csv},
                                                                         {"binary", TapeFormat::binary}};
const std::initializer_list<std::pair<const char*, TimeZoneRule>> kZones{{"us_eastern", TimeZoneRule::us_eastern},
                                                                         {"utc", TimeZoneRule::utc}};
const std::initializer_list<std::pair<const char*, GenKind>> kKinds{{"white_noise", GenKind::white_noise},
                                                                    {"clustering", GenKind::clustering}};
const std::initializer_list<std::pair<const char*, VarianceReading>> kReadings{
    {"variance", VarianceReading::variance}, {"stddev", VarianceReading::stddev}};
const std::initializer_list<std::pair<const char*, SlotScale>> kSlotScales{{"mean_abs", SlotScale::mean_abs},
                                                                           {"signed_mean", SlotScale::signed_mean}};
const std::initializer_list<std::pair<const char*, VolatilityMeasure>> kVolMeasures{
    {"abs", VolatilityMeasure::abs}, {"squared", VolatilityMeasure::squared}};
const std::initializer_list<std::pair<const char*, VolumeMeasure>> kVolumeMeasures{
    {"shares", VolumeMeasure::shares}, {"trades", VolumeMeasure::trades}};

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
  bool hashed = true;
};

// Builders for the common field shapes.
template <class T>
Field size_field(const char* key, T RunConfig::*section, std::size_t T::*member) {
  return {key, [=](const RunConfig& c) { return std::to_string(c.*section.*member); },
          [=](RunConfig& c, std::string_view v) { c.*section.*member = parse_size(v); }};
}

template <class T>
Field double_field(const char* key, T RunConfig::*section, double T::*member) {
  return {key, [=](const RunConfig& c) { return fmt_double(c.*section.*member); },
          [=](RunConfig& c, std::string_view v) { c.*section.*member = parse_number<double>(v); }};
}

template <class T>
Field bool_field(const char* key, T RunConfig::*section, bool T::*member) {
  return {key, [=](const RunConfig& c) { return std::string(c.*section.*member ? "true" : "false"); },
          [=](RunConfig& c, std::string_view v) { c.*section.*member = parse_bool(v); }};
}

template <class T>
Field duration_field(const char* key, T RunConfig::*section, std::int64_t T::*member) {
  return {key, [=](const RunConfig& c) { return format_duration(c.*section.*member); },
          [=](RunConfig& c, std::string_view v) { c.*section.*member = parse_duration(trim(v)); }};
}

template <class T>
Field count_field(const char* key, T RunConfig::*section, std::int64_t T::*member) {
  return {key, [=](const RunConfig& c) { return std::to_string(c.*section.*member); },
          [=](RunConfig& c, std::string_view v) {
            const auto n = parse_number<std::int64_t>(v);
            if (n <= 0) throw std::invalid_argument("must be positive");
            c.*section.*member = n;
          }};
}

template <class T, class Enum>
Field enum_field(const char* key, T RunConfig::*section, Enum T::*member,
                 std::initializer_list<std::pair<const char*, Enum>> names) {
  return {key, [=](const RunConfig& c) { return enum_name(c.*section.*member, names); },
          [=](RunConfig& c, std::string_view v) { c.*section.*member = parse_enum(v, names); }};
}

Field gen_double(const char* key, double GenSpec::*member) {
  return {key, [=](const RunConfig& c) { return fmt_double(c.synth.spec.*member); },
          [=](RunConfig& c, std::string_view v) { c.synth.spec.*member = parse_number<double>(v); }};
}

Field gen_size(const char* key, std::size_t GenSpec::*member) {
  return {key, [=](const RunConfig& c) { return std::to_string(c.synth.spec.*member); },
          [=](RunConfig& c, std::string_view v) { c.synth.spec.*member = parse_size(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using RC = RunConfig;
    std::vector<Field> f;
    // input
    f.push_back({"input.tape", [](const RC& c) { return join_strings(c.input.tapes); },
                 [](RC& c, std::string_view v) { c.input.tapes = split_list(v); }});
    f.push_back(enum_field("input.format", &RC::input, &InputConfig::format, kFormats));
    f.push_back({"input.symbols", [](const RC& c) { return join_strings(c.input.symbols); },
                 [](RC& c, std::string_view v) { c.input.symbols = split_list(v); }});
    // session
    f.push_back({"session.open", [](const RC& c) { return format_time_of_day(c.calendar.session_open_ns); },
                 [](RC& c, std::string_view v) { c.calendar.session_open_ns = parse_time_of_day(trim(v)); }});
    f.push_back({"session.close", [](const RC& c) { return format_time_of_day(c.calendar.session_close_ns); },
                 [](RC& c, std::string_view v) { c.calendar.session_close_ns = parse_time_of_day(trim(v)); }});
    f.push_back(enum_field("session.zone", &RC::calendar, &SessionCalendar::zone, kZones));
    f.push_back({"session.utc_offset_minutes",
                 [](const RC& c) { return std::to_string(c.calendar.utc_offset_ns / kNanosPerMinute); },
                 [](RC& c, std::string_view v) {
                   c.calendar.utc_offset_ns = parse_number<std::int64_t>(v) * kNanosPerMinute;
                 }});
    f.push_back({"session.days",
                 [](const RC& c) { return join<Date>(c.calendar.trading_days, [](const Date& d) { return d.iso(); }); },
                 [](RC& c, std::string_view v) {
                   c.calendar.trading_days.clear();
                   for (const auto& s : split_list(v)) c.calendar.trading_days.push_back(Date::parse(s));
                 }});
    // synth
    f.push_back(bool_field("synth.enabled", &RC::synth, &SynthConfig::enabled));
    f.push_back({"synth.kind", [](const RC& c) { return enum_name(c.synth.spec.kind, kKinds); },
                 [](RC& c, std::string_view v) { c.synth.spec.kind = parse_enum(v, kKinds); }});
    f.push_back(size_field("synth.symbols", &RC::synth, &SynthConfig::symbols));
    f.push_back({"synth.symbol", [](const RC& c) { return c.synth.spec.symbol; },
                 [](RC& c, std::string_view v) {
                   v = trim(v);
                   if (v.empty() || v.find(',') != std::string_view::npos) throw std::invalid_argument("bad symbol");
                   c.synth.spec.symbol = std::string(v);
                 }});
    f.push_back(gen_size("synth.days", &GenSpec::days));
    f.push_back(gen_size("synth.trades_per_day", &GenSpec::trades_per_day));
    f.push_back(gen_double("synth.variance", &GenSpec::return_variance));
    f.push_back({"synth.reading", [](const RC& c) { return enum_name(c.synth.spec.reading, kReadings); },
                 [](RC& c, std::string_view v) { c.synth.spec.reading = parse_enum(v, kReadings); }});
    f.push_back(gen_double("synth.omega", &GenSpec::omega));
    f.push_back(gen_double("synth.alpha", &GenSpec::alpha));
    f.push_back(gen_double("synth.beta", &GenSpec::beta));
    f.push_back(gen_double("synth.start_price", &GenSpec::start_price));
    f.push_back({"synth.base_size", [](const RC& c) { return std::to_string(c.synth.spec.base_size); },
                 [](RC& c, std::string_view v) { c.synth.spec.base_size = parse_number<std::int64_t>(v); }});
    f.push_back(gen_double("synth.size_coupling", &GenSpec::size_coupling));
    f.push_back({"synth.seed", [](const RC& c) { return std::to_string(c.synth.spec.seed); },
                 [](RC& c, std::string_view v) { c.synth.spec.seed = parse_number<std::uint64_t>(v); }});
    f.push_back({"synth.first_day", [](const RC& c) { return c.synth.spec.first_day.iso(); },
                 [](RC& c, std::string_view v) { c.synth.spec.first_day = Date::parse(trim(v)); }});
    // series
    f.push_back({"series.clock_scales",
                 [](const RC& c) {
                   return join<std::int64_t>(c.battery.clock_scales, [](const std::int64_t& d) { return format_duration(d); });
                 },
                 [](RC& c, std::string_view v) {
                   c.battery.clock_scales.clear();
                   for (const auto& s : split_list(v)) c.battery.clock_scales.push_back(parse_duration(s));
                 }});
    f.push_back({"series.event_scales",
                 [](const RC& c) {
                   return join<std::int64_t>(c.battery.event_scales, [](const std::int64_t& n) { return std::to_string(n); });
                 },
                 [](RC& c, std::string_view v) {
                   c.battery.event_scales.clear();
                   for (const auto& s : split_list(v)) c.battery.event_scales.push_back(parse_number<std::int64_t>(s));
                 }});
    f.push_back(duration_field("series.clock_base", &RC::battery, &BatteryConfig::clock_base));
    f.push_back(count_field("series.event_base", &RC::battery, &BatteryConfig::event_base));
    f.push_back(enum_field("series.slot_scale", &RC::battery, &BatteryConfig::slot_scale, kSlotScales));
    f.push_back(bool_field("series.normalize_lags", &RC::battery, &BatteryConfig::normalize_lags));
    // facts
    f.push_back({"facts.enabled",
                 [](const RC& c) {
                   std::vector<int> ids(c.battery.facts.begin(), c.battery.facts.end());
                   return join<int>(ids, [](const int& i) { return std::to_string(i); });
                 },
                 [](RC& c, std::string_view v) {
                   c.battery.facts.clear();
                   for (const auto& s : split_list(v)) c.battery.facts.insert(parse_number<int>(s));
                 }});
    f.push_back(bool_field("facts.clock", &RC::battery, &BatteryConfig::clock_time));
    f.push_back(bool_field("facts.event", &RC::battery, &BatteryConfig::event_time));
    f.push_back(size_field("acf.tau_max", &RC::battery, &BatteryConfig::acf_tau_max));
    f.push_back(size_field("abs_acf.tau_max", &RC::battery, &BatteryConfig::abs_acf_tau_max));
    f.push_back(double_field("abs_acf.fit_min", &RC::battery, &BatteryConfig::fit_min));
    f.push_back(double_field("abs_acf.fit_max", &RC::battery, &BatteryConfig::fit_max));
    f.push_back({"gain_loss.quantiles",
                 [](const RC& c) { return join<double>(c.battery.loss_quantiles, [](const double& q) { return fmt_double(q); }); },
                 [](RC& c, std::string_view v) {
                   c.battery.loss_quantiles.clear();
                   for (const auto& s : split_list(v)) c.battery.loss_quantiles.push_back(parse_number<double>(s));
                 }});
    f.push_back(size_field("gain_loss.min_exceedances", &RC::battery, &BatteryConfig::min_exceedances));
    f.push_back(double_field("intermittency.quantile", &RC::battery, &BatteryConfig::extreme_quantile));
    f.push_back(duration_field("intermittency.clock_window", &RC::battery, &BatteryConfig::clock_window));
    f.push_back(count_field("intermittency.event_window", &RC::battery, &BatteryConfig::event_window));
    f.push_back(size_field("leverage.tau_max", &RC::battery, &BatteryConfig::leverage_tau_max));
    f.push_back(enum_field("leverage.measure", &RC::battery, &BatteryConfig::leverage_measure, kVolMeasures));
    f.push_back(size_field("volume.tau_max", &RC::battery, &BatteryConfig::volume_tau_max));
    f.push_back(enum_field("volume.measure", &RC::battery, &BatteryConfig::volume_measure, kVolumeMeasures));
    f.push_back(duration_field("asymmetry.clock_coarse", &RC::battery, &BatteryConfig::clock_coarse));
    f.push_back(count_field("asymmetry.event_coarse", &RC::battery, &BatteryConfig::event_coarse));
    f.push_back(size_field("asymmetry.tau_max", &RC::battery, &BatteryConfig::asymmetry_tau_max));
    f.push_back(bool_field("asymmetry.rogers_satchell", &RC::battery, &BatteryConfig::rogers_satchell));
    // verdict
    f.push_back(double_field("verdict.symbol_fraction", &RC::rules, &VerdictRules::symbol_fraction));
    f.push_back(double_field("verdict.lag_fraction", &RC::rules, &VerdictRules::lag_fraction));
    f.push_back(double_field("verdict.small_acf", &RC::rules, &VerdictRules::small_acf));
    f.push_back(size_field("verdict.acf_short_lags", &RC::rules, &VerdictRules::acf_short_lags));
    f.push_back(size_field("verdict.clustering_lags", &RC::rules, &VerdictRules::clustering_lags));
    f.push_back(double_field("verdict.beta_min", &RC::rules, &VerdictRules::beta_min));
    f.push_back(double_field("verdict.beta_max", &RC::rules, &VerdictRules::beta_max));
    f.push_back(double_field("verdict.min_r_squared", &RC::rules, &VerdictRules::min_r_squared));
    f.push_back(size_field("verdict.asymmetry_lags", &RC::rules, &VerdictRules::asymmetry_lags));
    // bands
    f.push_back(bool_field("bands.enabled", &RC::bands, &BandConfig::enabled));
    f.push_back(size_field("bands.replicates", &RC::bands, &BandConfig::replicates));
    f.push_back({"bands.seed", [](const RC& c) { return std::to_string(c.bands.seed); },
                 [](RC& c, std::string_view v) { c.bands.seed = parse_number<std::uint64_t>(v); }});
    f.push_back(size_field("bands.days", &RC::bands, &BandConfig::days));
    f.push_back(size_field("bands.trades_per_day", &RC::bands, &BandConfig::trades_per_day));
    Field cache{"bands.cache_dir", [](const RC& c) { return c.bands.cache_dir; },
                [](RC& c, std::string_view v) { c.bands.cache_dir = std::string(trim(v)); }, false};
    f.push_back(cache);
    // run
    Field workers{"run.workers", [](const RC& c) { return std::to_string(c.workers); },
                  [](RC& c, std::string_view v) { c.workers = parse_size(v); }, false};
    f.push_back(workers);
    Field output{"run.output", [](const RC& c) { return c.output_dir; },
                 [](RC& c, std::string_view v) { c.output_dir = std::string(trim(v)); }, false};
    f.push_back(output);
    return f;
  }();
  return table;
}

// "section.key must ..." -> ("section.key", "must ...")
ConfigIssue split_problem(const std::string& problem) {
  const auto cut = problem.find_first_of(" :");
  if (cut == std::string::npos) return {problem, problem};
  std::string msg = problem.substr(cut + 1);
  if (!msg.empty() && msg.front() == ' ') msg.erase(0, 1);
  return {problem.substr(0, cut), msg};
}

void check(RunConfig& c, std::vector<ConfigIssue>& errors) {
  if (c.input.tapes.empty() && !c.synth.enabled) {
    errors.push_back({"input.tape", "no tape file given and synthesis is disabled"});
  }
  const GenSpec& g = c.synth.spec;
  if (g.alpha < 0.0 || g.beta < 0.0) errors.push_back({"synth.alpha", "alpha and beta must be non-negative"});
  if (!(g.alpha + g.beta < 1.0)) {
    errors.push_back({"synth.alpha", "stationarity constraint violated: alpha + beta = " + fmt_double(g.alpha + g.beta) +
                                         " must be below 1"});
  }
  if (!(g.return_variance > 0.0)) errors.push_back({"synth.variance", "must be positive"});
  if (g.days == 0) errors.push_back({"synth.days", "must be at least 1"});
  if (g.trades_per_day == 0) errors.push_back({"synth.trades_per_day", "must be at least 1"});
  if (!(g.start_price > 0.0)) errors.push_back({"synth.start_price", "must be positive"});
  if (g.base_size < 1) errors.push_back({"synth.base_size", "must be at least 1"});
  if (g.size_coupling < 0.0) errors.push_back({"synth.size_coupling", "must be non-negative"});
  if (c.synth.symbols == 0) errors.push_back({"synth.symbols", "must be at least 1"});
  if (c.calendar.session_open_ns >= c.calendar.session_close_ns) {
    errors.push_back({"session.open", "session must open before it closes"});
  }
  for (std::size_t i = 1; i < c.calendar.trading_days.size(); ++i) {
    if (c.calendar.trading_days[i] <= c.calendar.trading_days[i - 1]) {
      errors.push_back({"session.days", "dates must be strictly increasing"});
      break;
    }
  }
  if (c.bands.replicates == 0) errors.push_back({"bands.replicates", "must be at least 1"});
  if (c.bands.days == 0) errors.push_back({"bands.days", "must be at least 1"});
  if (c.bands.trades_per_day == 0) errors.push_back({"bands.trades_per_day", "must be at least 1"});
  if (c.workers == 0) errors.push_back({"run.workers", "must be at least 1"});
  for (const auto& p : c.battery.problems()) errors.push_back(split_problem(p));
  for (const auto& p : c.rules.problems()) errors.push_back(split_problem(p));
}

std::string canonical_subset(const RunConfig& config, const std::function<bool(std::string_view)>& keep) {
  std::string out;
  for (const auto& f : fields()) {
    if (!f.hashed || !keep(f.key)) continue;
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::vector<GenSpec> SynthConfig::symbol_specs() const {
  std::vector<GenSpec> out;
  const int width = symbols < 10 ? 1 : symbols < 100 ? 2 : symbols < 1000 ? 3 : 6;
  for (std::size_t i = 0; i < symbols; ++i) {
    GenSpec s = spec;
    if (symbols > 1) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%0*zu", width, i + 1);
      s.symbol += buf;
    }
    s.seed = spec.seed + i;
    out.push_back(std::move(s));
  }
  return out;
}

GenSpec RunConfig::band_spec() const {
  GenSpec g;
  g.kind = GenKind::white_noise;
  g.days = bands.days;
  g.trades_per_day = bands.trades_per_day;
  g.return_variance = synth.spec.return_variance;
  g.reading = synth.spec.reading;
  g.start_price = synth.spec.start_price;
  g.base_size = synth.spec.base_size;
  g.first_day = synth.spec.first_day;
  g.symbol = "NOISE";
  g.seed = bands.seed;
  return g;
}

ConfigResult validate_config(std::string_view text, const std::vector<ConfigOverride>& overrides) {
  ConfigResult result;
  std::vector<ConfigOverride> entries;
  try {
    boost::property_tree::ptree tree;
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
    for (const auto& [section, node] : tree) {
      if (node.empty()) {
        // Canonical "section.key = value" lines load back as they are.
        if (section.find('.') != std::string::npos) {
          entries.emplace_back(section, node.data());
        } else {
          result.errors.push_back({section, "key outside of any section"});
        }
        continue;
      }
      for (const auto& [key, value] : node) entries.emplace_back(section + "." + key, value.data());
    }
  } catch (const boost::property_tree::ini_parser_error& e) {
    result.errors.push_back({"line " + std::to_string(e.line()), e.message()});
    return result;
  }
  entries.insert(entries.end(), overrides.begin(), overrides.end());

  std::map<std::string_view, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;

  RunConfig config;
  for (const auto& [key, value] : entries) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      result.errors.push_back({key, "unknown key"});
      continue;
    }
    try {
      it->second->set(config, value);
    } catch (const std::exception& e) {
      result.errors.push_back({key, e.what()});
    }
  }
  check(config, result.errors);
  if (result.errors.empty()) result.config = std::move(config);
  return result;
}

std::string canonical_config(const RunConfig& config) {
  return canonical_subset(config, [](std::string_view) { return true; });
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  return hex64(fnv1a("schema=" + std::to_string(kReportSchemaVersion) + "\n" + canonical_config(config)));
}

std::string band_cache_key(const RunConfig& config) {
  static const std::set<std::string_view> sections{"session",      "series",        "facts",
                                                   "acf",          "abs_acf",       "gain_loss",
                                                   "intermittency", "leverage",     "volume",
                                                   "asymmetry",    "bands"};
  const auto text = canonical_subset(config, [](std::string_view key) {
    if (key == "bands.enabled" || key == "session.days") return false;
    if (key == "synth.variance" || key == "synth.reading" || key == "synth.start_price" ||
        key == "synth.base_size" || key == "synth.first_day") {
      return true;
    }
    return sections.count(key.substr(0, key.find('.'))) != 0;
  });
  return hex64(fnv1a("bands schema=" + std::to_string(kReportSchemaVersion) + "\n" + text));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

}  // namespace stylized
