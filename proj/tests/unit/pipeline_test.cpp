#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "stylized/pipeline.hpp"

using namespace stylized;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/stylized-test-XXXXXX";
    path_ = mkdtemp(tmpl);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig config_from(const std::string& text, const std::vector<ConfigOverride>& overrides = {}) {
  auto r = validate_config(text, overrides);
  if (!r.config) {
    ADD_FAILURE() << r.errors.front().key << ": " << r.errors.front().message;
    return {};
  }
  return *r.config;
}

// Two small white-noise symbols, every fact, a few cheap bands.
const char* kSmallRun =
    "[synth]\nenabled = true\nsymbols = 2\ndays = 3\ntrades_per_day = 4000\nseed = 5\n"
    "[series]\nclock_scales = 1min,5min\nevent_scales = 1,10\n"
    "[intermittency]\nevent_window = 100\n"
    "[asymmetry]\nevent_coarse = 100\n"
    "[bands]\nreplicates = 3\ndays = 3\ntrades_per_day = 4000\n";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STYLIZED_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Pipeline, MinimalRunWithoutBandsIsIndeterminate) {
  TempDir dir;
  const auto config = config_from(
      "[synth]\nenabled = true\nsymbols = 2\ndays = 2\ntrades_per_day = 2000\n"
      "[facts]\nenabled = 1\nevent = false\n[series]\nclock_scales = 1min\n[bands]\nenabled = false\n");
  const auto report = run_pipeline(config);
  write_report(report, dir.path());
  for (const auto& v : report.verdicts) EXPECT_EQ(v.overall, Verdict::indeterminate) << v.fact;
  EXPECT_TRUE(fs::exists(dir.path() / "curves" / "SYN1.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "curves" / "SYN2.json"));
  ASSERT_EQ(report.batteries.size(), 2u);
  EXPECT_EQ(report.batteries[0].curves.size(), 1u);
  EXPECT_TRUE(report.batteries[0].find("acf/clock/1min"));

  const auto summary = slurp(dir.path() / "summary.csv");
  EXPECT_EQ(summary.rfind("# schema=1 config_hash=" + report.config_hash + "\n", 0), 0u);
  EXPECT_NE(summary.find("fact,name,clock_time,event_time,overall,rule\n"), std::string::npos);
}

TEST(Pipeline, EveryFileCarriesTheConfigHash) {
  TempDir dir;
  const auto report = run_pipeline(config_from(kSmallRun));
  write_report(report, dir.path());
  const auto files = read_tree(dir.path());
  EXPECT_GE(files.size(), 10u);
  for (const auto& [name, bytes] : files) {
    EXPECT_NE(bytes.find(report.config_hash), std::string::npos) << name;
  }
}

TEST(Pipeline, ByteIdenticalAcrossRunsAndWorkerCounts) {
  TempDir a, b, c;
  write_report(run_pipeline(config_from(kSmallRun, {{"run.workers", "1"}})), a.path());
  write_report(run_pipeline(config_from(kSmallRun, {{"run.workers", "1"}})), b.path());
  write_report(run_pipeline(config_from(kSmallRun, {{"run.workers", "8"}})), c.path());
  const auto ta = read_tree(a.path());
  EXPECT_EQ(ta, read_tree(b.path()));
  EXPECT_EQ(ta, read_tree(c.path()));
}

TEST(Pipeline, MissingSymbolsAreListedAndSkipped) {
  const auto config = config_from(
      "[input]\nsymbols = SYN2,GHOST\n"
      "[synth]\nenabled = true\nsymbols = 3\ndays = 1\ntrades_per_day = 500\n"
      "[facts]\nenabled = 1\n[bands]\nenabled = false\n");
  const auto report = run_pipeline(config);
  EXPECT_EQ(report.missing_symbols, std::vector<std::string>{"GHOST"});
  ASSERT_EQ(report.batteries.size(), 1u);
  EXPECT_EQ(report.batteries[0].symbol, "SYN2");
}

TEST(Pipeline, TapeFilesMergeAndFilter) {
  TempDir dir;
  GenSpec spec;
  spec.days = 2;
  spec.trades_per_day = 300;
  spec.symbol = "AAA";
  SymbolTape a = gen_white_noise(spec);
  // One print after the close that the session filter must drop.
  Trade late = a.trades.back();
  late.ts_ns += 12 * kNanosPerHour;
  a.trades.push_back(late);
  write_tape_file((dir.path() / "a.bin").string(), {a}, TapeFormat::binary);

  const auto config = config_from("[input]\ntape = " + (dir.path() / "a.bin").string() +
                                  "\nformat = binary\n[facts]\nenabled = 1\n[bands]\nenabled = false\n");
  const auto in = load_input(config);
  ASSERT_EQ(in.tape.size(), 1u);
  EXPECT_EQ(in.tape[0].trades.size(), 600u);
  EXPECT_EQ(in.sources.at(0).parse.accepted, 601u);

  const auto missing = config_from("[input]\ntape = " + (dir.path() / "nope.csv").string() + "\n");
  EXPECT_THROW(load_input(missing), DataError);
}

TEST(Bands, JsonRoundTripIsExact) {
  BandSet bands;
  LagCurve c;
  c.stat_id = "acf";
  c.scale_label = "1min";
  c.push(1, 0.1 + 0.2, 100);
  c.push(2, std::nullopt, 0);
  c.push(3, -1e-17, 98);
  accumulate_band(bands, {c});
  bands.begin()->second.seed = 42;
  std::stringstream buf;
  write_bands_json(buf, bands, "0123456789abcdef");
  const auto back = read_bands_json(buf);
  ASSERT_EQ(back.size(), 1u);
  const auto& x = back.begin()->second;
  const auto& y = bands.begin()->second;
  EXPECT_EQ(x.key, y.key);
  EXPECT_EQ(x.grid, y.grid);
  EXPECT_EQ(x.lo[0], y.lo[0]);
  EXPECT_EQ(x.hi[2], y.hi[2]);
  EXPECT_TRUE(std::isnan(x.lo[1]));
  EXPECT_EQ(x.omitted, y.omitted);
  EXPECT_EQ(x.seed, 42u);
}

TEST(Bands, CacheIsWrittenOnceAndReused) {
  TempDir dir;
  const auto config = config_from(kSmallRun, {{"bands.cache_dir", dir.path().string()}, {"facts.enabled", "1,6"}});
  const auto first = load_or_build_bands(config);
  const auto file = dir.path() / ("bands-" + band_cache_key(config) + ".json");
  ASSERT_TRUE(fs::exists(file));
  const auto bytes = slurp(file);
  const auto second = load_or_build_bands(config);
  EXPECT_EQ(slurp(file), bytes);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [key, band] : first) {
    EXPECT_EQ(band.lo, second.at(key).lo);
    EXPECT_EQ(band.hi, second.at(key).hi);
  }
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const auto cfg = dir.path() / "run.ini";
  std::ofstream(cfg) << kSmallRun << "[facts]\nenabled = 1\n";
  EXPECT_EQ(run_cli("check -c " + cfg.string()), 0);
  EXPECT_EQ(run_cli("check"), 1);  // no tape and no synth
  EXPECT_EQ(run_cli("check -c " + cfg.string() + " --synth.alpha=0.5 --synth.beta=0.6"), 1);
  EXPECT_EQ(run_cli("check -c " + cfg.string() + " --no.such=1"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("analyze --input.tape=" + (dir.path() / "missing.csv").string()), 2);

  const auto bad = dir.path() / "bad.csv";
  std::ofstream(bad) << "not,a,tape\n";
  EXPECT_EQ(run_cli("stats --input.tape=" + bad.string()), 2);
}

TEST(Cli, SynthThenAnalyzeWritesTheBundle) {
  TempDir dir;
  const auto tape = dir.path() / "t.csv";
  const auto out = dir.path() / "report";
  ASSERT_EQ(run_cli("synth -t " + tape.string() + " --synth.days=2 --synth.trades_per_day=1500"), 0);
  ASSERT_EQ(run_cli("analyze -o " + out.string() + " --input.tape=" + tape.string() +
                    " --facts.enabled=1,6 --bands.enabled=false"),
            0);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "curves" / "SYN.csv"));

  // The written config reloads to the same hash.
  const auto reloaded = config_from(slurp(out / "config.ini"));
  EXPECT_NE(slurp(out / "summary.csv").find(config_hash(reloaded)), std::string::npos);

  const auto env_out = dir.path() / "from-env";
  const std::string cmd = "STYLIZED_OUT=" + env_out.string() + " " + STYLIZED_CLI + " analyze --input.tape=" +
                          tape.string() + " --facts.enabled=1 --bands.enabled=false >/dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(env_out / "summary.csv"));
}
