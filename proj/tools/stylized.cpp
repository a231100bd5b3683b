// Command-line front end: analyze | synth | band | stats | check.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stylized/config.hpp"
#include "stylized/pipeline.hpp"

namespace {

using namespace stylized;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitAnalyzer = 3;

struct ConfigError {
  std::vector<ConfigIssue> issues;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError{{{"--config", "cannot read " + path}}};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Turns leftover "--section.key=value" / "--section.key value" arguments into overrides.
std::vector<ConfigOverride> parse_overrides(const std::vector<std::string>& extras) {
  std::vector<ConfigOverride> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.find('.') == std::string::npos) {
      throw ConfigError{{{arg, "unrecognised argument"}}};
    }
    arg.erase(0, 2);
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(arg, extras[++i]);
    } else {
      throw ConfigError{{{arg, "missing value"}}};
    }
  }
  return out;
}

RunConfig load_config(const std::string& path, std::vector<ConfigOverride> overrides) {
  const std::string text = path.empty() ? std::string() : read_text(path);
  auto result = validate_config(text, overrides);
  if (!result.config) throw ConfigError{std::move(result.errors)};
  return *result.config;
}

std::filesystem::path output_dir(const std::string& flag, const RunConfig& config) {
  if (!flag.empty()) return flag;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("STYLIZED_OUT"); env != nullptr && *env != '\0') return env;
  return "stylized-report";
}

struct Common {
  std::string config_path;
  std::string out;
  std::size_t workers = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "INI configuration file");
  cmd->add_option("-o,--out", c.out, "output directory (default: run.output, then $STYLIZED_OUT)");
  cmd->add_option("-j,--workers", c.workers, "worker threads (overrides run.workers)");
  cmd->allow_extras();
  cmd->footer("Any configuration key can be overridden as --section.key=value.");
}

RunConfig resolve(CLI::App* cmd, const Common& c, std::vector<ConfigOverride> extra = {}) {
  auto overrides = parse_overrides(cmd->remaining());
  overrides.insert(overrides.begin(), extra.begin(), extra.end());
  if (c.workers > 0) overrides.emplace_back("run.workers", std::to_string(c.workers));
  return load_config(c.config_path, std::move(overrides));
}

int cmd_analyze(CLI::App* cmd, const Common& c) {
  const RunConfig config = resolve(cmd, c);
  const auto dir = output_dir(c.out, config);
  const Report report = run_pipeline(config, &std::cerr);
  write_report(report, dir);
  for (const auto& v : report.verdicts) {
    std::cout << v.fact << "  " << v.name << ": clock " << to_string(v.clock.verdict) << ", event "
              << to_string(v.event.verdict) << '\n';
  }
  std::cerr << "report written to " << dir.string() << " (config " << report.config_hash << ")\n";
  return kExitOk;
}

int cmd_synth(CLI::App* cmd, const Common& c, const std::string& tape_path, const std::string& format) {
  const RunConfig config = resolve(cmd, c, {{"synth.enabled", "true"}});
  Tape tape;
  for (const auto& spec : config.synth.symbol_specs()) tape.push_back(generate(spec));
  std::sort(tape.begin(), tape.end(), [](const SymbolTape& a, const SymbolTape& b) { return a.symbol < b.symbol; });
  const TapeFormat fmt = format == "binary" ? TapeFormat::binary : TapeFormat::csv;
  write_tape_file(tape_path, tape, fmt);
  std::size_t n = 0;
  for (const auto& s : tape) n += s.trades.size();
  std::cerr << "wrote " << n << " trades for " << tape.size() << " symbol(s) to " << tape_path << '\n';
  return kExitOk;
}

int cmd_band(CLI::App* cmd, const Common& c) {
  RunConfig config = resolve(cmd, c);
  const auto dir = output_dir(c.out, config);
  const BandSet bands = load_or_build_bands(config, &std::cerr);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "bands.json", std::ios::binary | std::ios::trunc);
  write_bands_json(out, bands, config_hash(config));
  std::cerr << bands.size() << " bands written to " << (dir / "bands.json").string() << '\n';
  return kExitOk;
}

int cmd_stats(CLI::App* cmd, const Common& c) {
  const RunConfig config = resolve(cmd, c);
  const LoadedInput input = load_input(config, &std::cerr);
  const auto stats = tape_stats(input.tape, input.calendar);
  if (c.out.empty()) {
    write_tape_stats_csv(std::cout, stats, config_hash(config));
  } else {
    std::filesystem::create_directories(c.out);
    std::ofstream out(std::filesystem::path(c.out) / "tape_stats.csv", std::ios::binary | std::ios::trunc);
    write_tape_stats_csv(out, stats, config_hash(config));
  }
  return kExitOk;
}

int cmd_check(CLI::App* cmd, const Common& c) {
  const RunConfig config = resolve(cmd, c);
  std::cout << "# config_hash=" << config_hash(config) << '\n' << canonical_config(config);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stylized-fact analytics for trade tapes"};
  app.require_subcommand(1);

  Common common;
  auto* analyze = app.add_subcommand("analyze", "run the fact battery and write the report bundle");
  add_common(analyze, common);

  auto* synth = app.add_subcommand("synth", "write a synthetic tape from the [synth] section");
  add_common(synth, common);
  std::string tape_path;
  std::string format = "csv";
  synth->add_option("-t,--tape", tape_path, "tape file to write")->required();
  synth->add_option("-f,--format", format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));

  auto* band = app.add_subcommand("band", "compute (or load cached) white-noise bands");
  add_common(band, common);

  auto* stats_cmd = app.add_subcommand("stats", "print per-symbol tape statistics");
  add_common(stats_cmd, common);

  auto* check = app.add_subcommand("check", "validate the configuration and print it with defaults filled");
  add_common(check, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze, common);
    if (synth->parsed()) return cmd_synth(synth, common, tape_path, format);
    if (band->parsed()) return cmd_band(band, common);
    if (stats_cmd->parsed()) return cmd_stats(stats_cmd, common);
    if (check->parsed()) return cmd_check(check, common);
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues) std::cerr << "config error: " << issue.key << ": " << issue.message << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const AnalyzerError& e) {
    std::cerr << "analyzer failure: symbol " << e.symbol() << ", fact " << e.fact() << ": " << e.what() << '\n';
    return kExitAnalyzer;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitAnalyzer;
  }
  return kExitOk;
}
