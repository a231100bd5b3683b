#include "stylized/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "stylized/parallel.hpp"

namespace stylized {

namespace {

using ojson = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void note(std::ostream* log, const std::string& msg) {
  if (log != nullptr) *log << msg << '\n';
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

ojson json_num(double v) { return std::isnan(v) ? ojson(nullptr) : ojson(v); }

ojson json_opt(const std::optional<bool>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson header(const std::string& config_hash) {
  ojson j;
  j["schema"] = kReportSchemaVersion;
  j["config_hash"] = config_hash;
  return j;
}

std::string csv_header(const std::string& config_hash) {
  return "# schema=" + std::to_string(kReportSchemaVersion) + " config_hash=" + config_hash + "\n";
}

std::string safe_name(const std::string& symbol) {
  std::string out = symbol;
  for (char& c : out) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string dump(const ojson& j) { return j.dump(1) + "\n"; }

ojson curve_json(const LagCurve& c) {
  ojson j;
  j["key"] = c.key();
  j["stat"] = c.stat_id;
  j["kind"] = c.kind == ClockKind::clock ? "clock" : "event";
  j["scale"] = c.scale_label;
  ojson grid = ojson::array(), values = ojson::array(), n = ojson::array();
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    grid.push_back(c.grid[i]);
    values.push_back(json_num(c.values[i]));
    n.push_back(c.n_obs[i]);
  }
  j["grid"] = grid;
  j["values"] = values;
  j["n_obs"] = n;
  return j;
}

void merge_symbol(Tape& tape, SymbolTape incoming) {
  auto it = std::lower_bound(tape.begin(), tape.end(), incoming.symbol,
                             [](const SymbolTape& s, const std::string& sym) { return s.symbol < sym; });
  if (it == tape.end() || it->symbol != incoming.symbol) {
    tape.insert(it, std::move(incoming));
    return;
  }
  auto& trades = it->trades;
  const auto mid = static_cast<std::ptrdiff_t>(trades.size());
  trades.insert(trades.end(), incoming.trades.begin(), incoming.trades.end());
  std::inplace_merge(trades.begin(), trades.begin() + mid, trades.end(),
                     [](const Trade& a, const Trade& b) { return a.ts_ns < b.ts_ns; });
}

}  // namespace

LoadedInput load_input(const RunConfig& config, std::ostream* log) {
  LoadedInput in;
  in.calendar = config.calendar;
  for (const auto& path : config.input.tapes) {
    ParsedTape parsed;
    try {
      parsed = read_tape_file(path, config.input.format);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
    const auto& r = parsed.report;
    note(log, path + ": " + std::to_string(r.accepted) + " trades accepted, " + std::to_string(r.malformed) +
                  " malformed, " + std::to_string(r.rejected) + " rejected, " + std::to_string(r.out_of_order) +
                  " out of order");
    in.sources.push_back({path, r});
    for (auto& sym : parsed.tape) merge_symbol(in.tape, std::move(sym));
  }
  if (config.synth.enabled) {
    for (const auto& spec : config.synth.symbol_specs()) {
      SymbolTape t = generate(spec);
      ParseReport r;
      r.rows = r.accepted = t.trades.size();
      in.sources.push_back({"synth:" + spec.symbol, r});
      merge_symbol(in.tape, std::move(t));
    }
  }
  if (!config.input.symbols.empty()) {
    std::set<std::string> wanted(config.input.symbols.begin(), config.input.symbols.end());
    for (const auto& s : wanted) {
      const bool present = std::any_of(in.tape.begin(), in.tape.end(), [&](const SymbolTape& t) { return t.symbol == s; });
      if (!present) {
        in.missing_symbols.push_back(s);
        note(log, "symbol " + s + " not found in any input; skipped");
      }
    }
    std::erase_if(in.tape, [&](const SymbolTape& t) { return wanted.count(t.symbol) == 0; });
  }
  for (auto& sym : in.tape) filter_session_in_place(sym.trades, in.calendar);
  return in;
}

BandSet build_bands(const RunConfig& config) {
  return noise_bands(battery_analyzer(config.battery), config.band_spec(), config.bands.replicates, config.bands.seed,
                     config.workers);
}

BandSet load_or_build_bands(const RunConfig& config, std::ostream* log) {
  std::filesystem::path cached;
  if (!config.bands.cache_dir.empty()) {
    cached = std::filesystem::path(config.bands.cache_dir) / ("bands-" + band_cache_key(config) + ".json");
    std::ifstream in(cached, std::ios::binary);
    if (in) {
      note(log, "noise bands loaded from " + cached.string());
      return read_bands_json(in);
    }
  }
  note(log, "computing noise bands: " + std::to_string(config.bands.replicates) + " replicates of " +
                std::to_string(config.bands.days) + " days x " + std::to_string(config.bands.trades_per_day) +
                " trades");
  BandSet bands = build_bands(config);
  if (!cached.empty()) {
    std::filesystem::create_directories(cached.parent_path());
    std::ostringstream out;
    write_bands_json(out, bands, band_cache_key(config));
    // Write then rename so a concurrent reader never sees a partial file.
    const auto tmp = cached.string() + ".tmp";
    write_file(tmp, out.str());
    std::filesystem::rename(tmp, cached);
    note(log, "noise bands cached at " + cached.string());
  }
  return bands;
}

Report run_pipeline(const RunConfig& config, std::ostream* log) {
  Report report;
  report.config = config;
  report.config_hash = config_hash(config);

  LoadedInput input = load_input(config, log);
  report.sources = std::move(input.sources);
  report.missing_symbols = std::move(input.missing_symbols);
  report.tape_stats = tape_stats(input.tape, input.calendar);

  if (config.bands.enabled) report.bands = load_or_build_bands(config, log);

  report.batteries.resize(input.tape.size());
  parallel_for(input.tape.size(), config.workers, [&](std::size_t i) {
    report.batteries[i] = run_battery(input.tape[i], input.calendar, config.battery);
  });
  report.verdicts = judge(report.batteries, report.bands, config.battery, config.rules);
  return report;
}

void write_bands_json(std::ostream& out, const BandSet& bands, const std::string& config_hash) {
  ojson j = header(config_hash);
  ojson arr = ojson::array();
  for (const auto& [key, b] : bands) {
    ojson e;
    e["key"] = key;
    e["replicates"] = b.replicates;
    e["seed"] = b.seed;
    ojson grid = ojson::array(), lo = ojson::array(), hi = ojson::array(), omitted = ojson::array();
    for (std::size_t i = 0; i < b.grid.size(); ++i) {
      grid.push_back(b.grid[i]);
      lo.push_back(json_num(b.lo[i]));
      hi.push_back(json_num(b.hi[i]));
      omitted.push_back(b.omitted[i]);
    }
    e["grid"] = grid;
    e["lo"] = lo;
    e["hi"] = hi;
    e["omitted"] = omitted;
    arr.push_back(e);
  }
  j["bands"] = arr;
  out << dump(j);
}

BandSet read_bands_json(std::istream& in) {
  BandSet out;
  try {
    const auto j = ojson::parse(in);
    if (j.at("schema").get<int>() != kReportSchemaVersion) throw DataError("band file has a different schema");
    auto num_or_nan = [](const ojson& v) { return v.is_null() ? kNaN : v.get<double>(); };
    for (const auto& e : j.at("bands")) {
      NoiseBand b;
      b.key = e.at("key").get<std::string>();
      b.replicates = e.at("replicates").get<std::size_t>();
      b.seed = e.at("seed").get<std::uint64_t>();
      for (const auto& v : e.at("grid")) b.grid.push_back(v.get<double>());
      for (const auto& v : e.at("lo")) b.lo.push_back(num_or_nan(v));
      for (const auto& v : e.at("hi")) b.hi.push_back(num_or_nan(v));
      for (const auto& v : e.at("omitted")) b.omitted.push_back(v.get<std::size_t>());
      if (b.lo.size() != b.grid.size() || b.hi.size() != b.grid.size() || b.omitted.size() != b.grid.size()) {
        throw DataError("band " + b.key + ": array lengths differ");
      }
      out.emplace(b.key, std::move(b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad band file: ") + e.what());
  }
  return out;
}

void write_tape_stats_csv(std::ostream& out, const std::vector<SymbolTapeStats>& stats,
                          const std::string& config_hash) {
  out << csv_header(config_hash);
  out << "symbol,days,mean_per_day,total,max_per_day,min_per_day,"
         "interarrival_mean_ns,interarrival_median_ns,interarrival_stddev_ns,interarrival_min_ns,"
         "interarrival_max_ns,interarrival_samples\n";
  for (const auto& s : stats) {
    out << s.symbol << ',' << s.days << ',' << num(s.mean_per_day) << ',' << s.total << ',' << s.max_per_day << ','
        << s.min_per_day << ',';
    if (s.interarrival) {
      const auto& ia = *s.interarrival;
      out << num(ia.mean) << ',' << num(ia.median) << ',' << num(ia.stddev) << ',' << ia.min << ',' << ia.max << ','
          << ia.samples << '\n';
    } else {
      out << ",,,,,0\n";
    }
  }
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  const std::string& hash = report.config_hash;
  std::filesystem::create_directories(dir / "curves");

  write_file(dir / "config.ini", "# schema=" + std::to_string(kReportSchemaVersion) + " config_hash=" + hash + "\n" +
                                     canonical_config(report.config));

  // Table 1 shape.
  {
    std::ostringstream csv;
    csv << csv_header(hash) << "fact,name,clock_time,event_time,overall,rule\n";
    ojson j = header(hash);
    ojson rows = ojson::array();
    for (const auto& v : report.verdicts) {
      csv << v.fact << ',' << v.name << ',' << to_string(v.clock.verdict) << ',' << to_string(v.event.verdict) << ','
          << to_string(v.overall) << ',' << v.rule << '\n';
      ojson r;
      r["fact"] = v.fact;
      r["name"] = v.name;
      r["clock_time"] = to_string(v.clock.verdict);
      r["event_time"] = to_string(v.event.verdict);
      r["overall"] = to_string(v.overall);
      rows.push_back(r);
    }
    j["facts"] = rows;
    ojson sources = ojson::array();
    for (const auto& s : report.sources) {
      sources.push_back({{"source", s.source},
                         {"rows", s.parse.rows},
                         {"accepted", s.parse.accepted},
                         {"malformed", s.parse.malformed},
                         {"rejected", s.parse.rejected},
                         {"out_of_order", s.parse.out_of_order}});
    }
    j["inputs"] = sources;
    j["missing_symbols"] = report.missing_symbols;
    write_file(dir / "summary.csv", csv.str());
    write_file(dir / "summary.json", dump(j));
  }

  // Per-fact results with the rule constants they were judged by.
  {
    const auto& r = report.config.rules;
    ojson j = header(hash);
    j["rules"] = {{"symbol_fraction", r.symbol_fraction}, {"lag_fraction", r.lag_fraction},
                  {"small_acf", r.small_acf},             {"acf_short_lags", r.acf_short_lags},
                  {"clustering_lags", r.clustering_lags}, {"beta_min", r.beta_min},
                  {"beta_max", r.beta_max},               {"min_r_squared", r.min_r_squared},
                  {"asymmetry_lags", r.asymmetry_lags}};
    j["bands"] = report.config.bands.enabled ? "white_noise_min_max" : "none";
    ojson facts = ojson::array();
    for (const auto& v : report.verdicts) {
      auto kind_json = [](const KindVerdict& k) {
        return ojson{{"verdict", to_string(k.verdict)},
                     {"symbols", k.symbols},
                     {"supporting", k.supporting},
                     {"undetermined", k.undetermined}};
      };
      ojson f;
      f["fact"] = v.fact;
      f["name"] = v.name;
      f["rule"] = v.rule;
      f["clock_time"] = kind_json(v.clock);
      f["event_time"] = kind_json(v.event);
      f["overall"] = to_string(v.overall);
      ojson per = ojson::array();
      for (const auto& s : v.symbols) {
        per.push_back({{"symbol", s.symbol}, {"clock_time", json_opt(s.clock)}, {"event_time", json_opt(s.event)}});
      }
      f["symbols"] = per;
      facts.push_back(f);
    }
    j["facts"] = facts;
    write_file(dir / "facts.json", dump(j));
  }

  {
    std::ostringstream out;
    write_bands_json(out, report.bands, hash);
    write_file(dir / "bands.json", out.str());
  }

  {
    std::ostringstream csv;
    write_tape_stats_csv(csv, report.tape_stats, hash);
    write_file(dir / "tape_stats.csv", csv.str());
    ojson j = header(hash);
    ojson rows = ojson::array();
    for (const auto& s : report.tape_stats) {
      ojson r{{"symbol", s.symbol},
              {"days", s.days},
              {"mean_per_day", s.mean_per_day},
              {"total", s.total},
              {"max_per_day", s.max_per_day},
              {"min_per_day", s.min_per_day}};
      if (s.interarrival) {
        const auto& ia = *s.interarrival;
        r["interarrival_ns"] = {{"mean", ia.mean},  {"median", ia.median}, {"stddev", ia.stddev},
                                {"min", ia.min},    {"max", ia.max},       {"samples", ia.samples}};
      } else {
        r["interarrival_ns"] = nullptr;
      }
      rows.push_back(r);
    }
    j["symbols"] = rows;
    write_file(dir / "tape_stats.json", dump(j));
  }

  for (const auto& b : report.batteries) {
    const auto stem = safe_name(b.symbol);
    std::ostringstream csv;
    csv << csv_header(hash) << "symbol,stat,kind,scale,x,value,n_obs\n";
    ojson j = header(hash);
    j["symbol"] = b.symbol;
    ojson curves = ojson::array();
    for (const auto& [key, c] : b.curves) {
      const char* kind = c.kind == ClockKind::clock ? "clock" : "event";
      for (std::size_t i = 0; i < c.grid.size(); ++i) {
        csv << b.symbol << ',' << c.stat_id << ',' << kind << ',' << c.scale_label << ',' << num(c.grid[i]) << ','
            << num(c.values[i]) << ',' << c.n_obs[i] << '\n';
      }
      curves.push_back(curve_json(c));
    }
    j["curves"] = curves;
    ojson fits = ojson::array();
    for (const auto& [key, f] : b.fits) {
      fits.push_back({{"key", key},
                      {"beta", f.beta},
                      {"intercept", f.intercept},
                      {"fit_min", f.fit_min},
                      {"fit_max", f.fit_max},
                      {"r_squared", f.r_squared},
                      {"points", f.points}});
    }
    j["power_law_fits"] = fits;
    ojson norm = ojson::object();
    for (const auto& [key, n] : b.normalization) {
      norm[key] = {{"dropped_days", n.dropped_days}, {"dropped_slots", n.dropped_slots}};
    }
    j["normalization"] = norm;
    write_file(dir / "curves" / (stem + ".csv"), csv.str());
    write_file(dir / "curves" / (stem + ".json"), dump(j));
  }
}

}  // namespace stylized
