#include <gtest/gtest.h>

#include <cmath>

#include "stylized/verdict.hpp"

using namespace stylized;

namespace {

LagCurve curve(std::string stat, ClockKind kind, std::string scale, std::vector<double> grid, std::vector<double> values) {
  LagCurve c;
  c.stat_id = std::move(stat);
  c.kind = kind;
  c.scale_label = std::move(scale);
  c.grid = std::move(grid);
  c.values = std::move(values);
  c.n_obs.assign(c.grid.size(), 1000);
  return c;
}

NoiseBand band_for(const LagCurve& c, double lo, double hi) {
  NoiseBand b;
  b.key = c.key();
  b.grid = c.grid;
  b.lo.assign(c.grid.size(), lo);
  b.hi.assign(c.grid.size(), hi);
  b.omitted.assign(c.grid.size(), 0);
  b.replicates = 100;
  return b;
}

std::vector<double> lags(int from, int to) {
  std::vector<double> g;
  for (int t = from; t <= to; ++t) g.push_back(t);
  return g;
}

// abs_acf curve at the event base with `above` of 100 lags above a 0.01 band.
SymbolBattery clustering_battery(const std::string& symbol, int above) {
  SymbolBattery sb;
  sb.symbol = symbol;
  std::vector<double> v(100, 0.0);
  for (int i = 0; i < above; ++i) v[i] = 0.2;
  const auto c = curve("abs_acf", ClockKind::event, "1", lags(1, 100), v);
  sb.curves[c.key()] = c;
  return sb;
}

BandSet clustering_bands() {
  const auto c = curve("abs_acf", ClockKind::event, "1", lags(1, 100), std::vector<double>(100, 0.0));
  return {{c.key(), band_for(c, -0.01, 0.01)}};
}

BatteryConfig only(int fact) {
  BatteryConfig cfg;
  cfg.facts = {fact};
  return cfg;
}

const FactVerdict& verdict_of(const std::vector<FactVerdict>& vs, int fact) { return vs.at(fact - 1); }

}  // namespace

TEST(Verdict, LagFractionThresholdIsInclusive) {
  const auto bands = clustering_bands();
  const auto cfg = only(6);
  const VerdictRules rules;
  EXPECT_EQ(judge_symbol(6, ClockKind::event, clustering_battery("A", 80), bands, cfg, rules), true);
  EXPECT_EQ(judge_symbol(6, ClockKind::event, clustering_battery("A", 79), bands, cfg, rules), false);
  // No clock-time curve or band: undetermined.
  EXPECT_EQ(judge_symbol(6, ClockKind::clock, clustering_battery("A", 100), bands, cfg, rules), std::nullopt);
}

TEST(Verdict, SymbolFractionAggregation) {
  const auto bands = clustering_bands();
  std::vector<SymbolBattery> sbs;
  for (int i = 0; i < 10; ++i) sbs.push_back(clustering_battery("S" + std::to_string(i), i < 9 ? 100 : 0));
  auto vs = judge(sbs, bands, only(6), VerdictRules{});
  const auto& f6 = verdict_of(vs, 6);
  EXPECT_EQ(f6.rule, rule_id(6));
  EXPECT_EQ(f6.event.symbols, 10u);
  EXPECT_EQ(f6.event.supporting, 9u);
  EXPECT_EQ(f6.event.verdict, Verdict::supported);
  EXPECT_EQ(f6.clock.verdict, Verdict::indeterminate);
  EXPECT_EQ(f6.overall, Verdict::supported);

  sbs[8] = clustering_battery("S8", 0);
  vs = judge(sbs, bands, only(6), VerdictRules{});
  EXPECT_EQ(verdict_of(vs, 6).event.verdict, Verdict::not_supported);
  EXPECT_EQ(verdict_of(vs, 6).overall, Verdict::not_supported);
}

TEST(Verdict, EmptySymbolSetIsIndeterminateEverywhere) {
  const auto vs = judge({}, {}, BatteryConfig{}, VerdictRules{});
  ASSERT_EQ(vs.size(), 11u);
  for (const auto& v : vs) {
    EXPECT_EQ(v.clock.verdict, Verdict::indeterminate);
    EXPECT_EQ(v.event.verdict, Verdict::indeterminate);
    EXPECT_EQ(v.overall, Verdict::indeterminate);
  }
}

TEST(Verdict, DisabledFactsAreIndeterminate) {
  const auto vs = judge({clustering_battery("A", 100)}, clustering_bands(), only(2), VerdictRules{});
  EXPECT_EQ(verdict_of(vs, 6).overall, Verdict::indeterminate);
  EXPECT_FALSE(verdict_of(vs, 6).symbols.at(0).event.has_value());
}

TEST(Verdict, OverallPrefersSupportThenRejection) {
  // Kurtosis above band in event time only.
  SymbolBattery sb;
  sb.symbol = "A";
  const auto ev = curve("kurtosis", ClockKind::event, "", {1, 10}, {5.0, 1.0});
  const auto ck = curve("kurtosis", ClockKind::clock, "", {1, 5}, {0.0, 0.0});
  sb.curves[ev.key()] = ev;
  sb.curves[ck.key()] = ck;
  const BandSet bands = {{ev.key(), band_for(ev, -0.1, 0.1)}, {ck.key(), band_for(ck, -0.1, 0.1)}};
  auto vs = judge({sb}, bands, only(2), VerdictRules{});
  EXPECT_EQ(verdict_of(vs, 2).clock.verdict, Verdict::not_supported);
  EXPECT_EQ(verdict_of(vs, 2).event.verdict, Verdict::supported);
  EXPECT_EQ(verdict_of(vs, 2).overall, Verdict::supported);

  // Not supported in clock time, no band in event time.
  BandSet clock_only = {{ck.key(), band_for(ck, -0.1, 0.1)}};
  vs = judge({sb}, clock_only, only(2), VerdictRules{});
  EXPECT_EQ(verdict_of(vs, 2).event.verdict, Verdict::indeterminate);
  EXPECT_EQ(verdict_of(vs, 2).overall, Verdict::not_supported);
}

TEST(Verdict, Fact1NeedsLagOneOutsideAndAQuietTail) {
  std::vector<double> v(100, 0.01);
  v[0] = -0.3;
  SymbolBattery sb;
  auto c = curve("acf", ClockKind::event, "1", lags(1, 100), v);
  sb.curves[c.key()] = c;
  const BandSet bands = {{c.key(), band_for(c, -0.02, 0.02)}};
  const auto cfg = only(1);
  EXPECT_EQ(judge_symbol(1, ClockKind::event, sb, bands, cfg, VerdictRules{}), true);

  // Lag 1 inside the band.
  sb.curves[c.key()].values[0] = 0.0;
  EXPECT_EQ(judge_symbol(1, ClockKind::event, sb, bands, cfg, VerdictRules{}), false);

  // Loud tail: a quarter of the lags beyond the short ones are large.
  sb.curves[c.key()].values[0] = -0.3;
  for (std::size_t i = 2; i < 27; ++i) sb.curves[c.key()].values[i] = 0.2;
  EXPECT_EQ(judge_symbol(1, ClockKind::event, sb, bands, cfg, VerdictRules{}), false);
}

TEST(Verdict, Fact3UsesHighestQuantileDefinedInCurveAndBand) {
  SymbolBattery sb;
  const auto skew = curve("skew", ClockKind::event, "", {1}, {-1.0});
  auto lf = curve("loss_fraction", ClockKind::event, "1", {0.9, 0.99, 0.999}, {0.5, 0.7, 0.1});
  sb.curves[skew.key()] = skew;
  sb.curves[lf.key()] = lf;
  BandSet bands = {{skew.key(), band_for(skew, -0.5, 0.5)}, {lf.key(), band_for(lf, 0.4, 0.6)}};
  bands[lf.key()].lo[2] = bands[lf.key()].hi[2] = std::nan("");  // 0.999 undefined in the band
  EXPECT_EQ(judge_symbol(3, ClockKind::event, sb, bands, only(3), VerdictRules{}), true);

  sb.curves[lf.key()].values[1] = std::nan("");  // now 0.9 is the highest shared level
  EXPECT_EQ(judge_symbol(3, ClockKind::event, sb, bands, only(3), VerdictRules{}), false);
}

TEST(Verdict, Fact8ChecksExponentAndFit) {
  auto sb = clustering_battery("A", 100);
  const auto bands = clustering_bands();
  const auto cfg = only(8);
  const std::string key = "abs_acf/event/1";
  stats::PowerLawFit fit;
  fit.beta = 0.3;
  fit.r_squared = 0.9;
  sb.fits[key] = fit;
  EXPECT_EQ(judge_symbol(8, ClockKind::event, sb, bands, cfg, VerdictRules{}), true);
  sb.fits[key].r_squared = 0.4;
  EXPECT_EQ(judge_symbol(8, ClockKind::event, sb, bands, cfg, VerdictRules{}), false);
  sb.fits[key].r_squared = 0.9;
  sb.fits[key].beta = 1.2;
  EXPECT_EQ(judge_symbol(8, ClockKind::event, sb, bands, cfg, VerdictRules{}), false);
  sb.fits[key].beta = -0.1;
  EXPECT_EQ(judge_symbol(8, ClockKind::event, sb, bands, cfg, VerdictRules{}), false);
  // Without clustering there is nothing to fit.
  auto flat = clustering_battery("B", 0);
  flat.fits[key] = fit;
  EXPECT_EQ(judge_symbol(8, ClockKind::event, flat, bands, cfg, VerdictRules{}), false);
}

TEST(Verdict, Fact11NeedsDBelowBandOnTheFirstLags) {
  SymbolBattery sb;
  const auto d = curve("asymmetry_D", ClockKind::clock, "1min:30min", {1, 2, 3, 4, 5}, {-0.3, -0.3, -0.3, 0.0, 0.0});
  sb.curves[d.key()] = d;
  const BandSet bands = {{d.key(), band_for(d, -0.1, 0.1)}};
  EXPECT_EQ(judge_symbol(11, ClockKind::clock, sb, bands, only(11), VerdictRules{}), true);
  sb.curves[d.key()].values[2] = -0.05;
  EXPECT_EQ(judge_symbol(11, ClockKind::clock, sb, bands, only(11), VerdictRules{}), false);
}

TEST(Verdict, Fact10UsesLagZero) {
  SymbolBattery sb;
  const auto c = curve("volume_volatility", ClockKind::event, "1", {-1, 0, 1}, {0.0, 0.6, 0.0});
  sb.curves[c.key()] = c;
  const BandSet bands = {{c.key(), band_for(c, -0.05, 0.05)}};
  EXPECT_EQ(judge_symbol(10, ClockKind::event, sb, bands, only(10), VerdictRules{}), true);
  sb.curves[c.key()].values[1] = std::nan("");
  EXPECT_EQ(judge_symbol(10, ClockKind::event, sb, bands, only(10), VerdictRules{}), std::nullopt);
}

TEST(VerdictRules, Validation) {
  VerdictRules rules;
  EXPECT_TRUE(rules.problems().empty());
  rules.symbol_fraction = 1.5;
  rules.lag_fraction = 0.0;
  EXPECT_EQ(rules.problems().size(), 2u);
  EXPECT_THROW(rules.validate(), std::invalid_argument);
}

TEST(Verdict, NamesAndIds) {
  EXPECT_STREQ(to_string(Verdict::not_supported), "not_supported");
  for (int f = 1; f <= kFactCount; ++f) {
    EXPECT_NE(std::string(rule_id(f)), "");
    EXPECT_NE(std::string(fact_name(f)), "");
  }
}
