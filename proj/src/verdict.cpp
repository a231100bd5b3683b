#include "stylized/verdict.hpp"

#include <cmath>
#include <stdexcept>

namespace stylized {

namespace {

struct Point {
  double value;
  double lo;
  double hi;
};

std::string base_key(std::string_view stat, ClockKind kind, const BatteryConfig& cfg) {
  return curve_key(stat, kind, ClockSpec{kind, cfg.base(kind)}.scale_label());
}

const NoiseBand* find_band(const BandSet& bands, const std::string& key) {
  const auto it = bands.find(key);
  return it == bands.end() ? nullptr : &it->second;
}

// Curve value and band envelope at grid value x, when all three are defined.
std::optional<Point> point(const LagCurve* curve, const NoiseBand* band, double x) {
  if (curve == nullptr || band == nullptr) return std::nullopt;
  const auto v = curve->at(x);
  const auto b = band->index_of(x);
  if (!v || !b) return std::nullopt;
  return Point{*v, band->lo[*b], band->hi[*b]};
}

struct Fraction {
  std::size_t hits = 0;
  std::size_t total = 0;
  [[nodiscard]] std::optional<bool> at_least(double share) const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(hits) >= share * static_cast<double>(total);
  }
};

std::optional<bool> fact1(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg,
                          const VerdictRules& rules) {
  const auto key = base_key("acf", kind, cfg);
  const LagCurve* c = sb.find(key);
  const auto first = point(c, find_band(bands, key), 1.0);
  if (!first) return std::nullopt;
  Fraction small;
  for (std::size_t i = 0; i < c->grid.size(); ++i) {
    if (c->grid[i] <= static_cast<double>(rules.acf_short_lags) || std::isnan(c->values[i])) continue;
    ++small.total;
    if (std::abs(c->values[i]) < rules.small_acf) ++small.hits;
  }
  const auto tail_quiet = small.at_least(rules.lag_fraction);
  if (!tail_quiet) return std::nullopt;
  const bool outside = first->value < first->lo || first->value > first->hi;
  return outside && *tail_quiet;
}

std::optional<Point> finest(const SymbolBattery& sb, const BandSet& bands, const std::string& key) {
  const LagCurve* c = sb.find(key);
  if (c == nullptr || c->grid.empty()) return std::nullopt;
  return point(c, find_band(bands, key), c->grid.front());
}

std::optional<bool> fact2(const SymbolBattery& sb, const BandSet& bands, ClockKind kind) {
  const auto p = finest(sb, bands, curve_key("kurtosis", kind));
  if (!p) return std::nullopt;
  return p->value > p->hi;
}

std::optional<bool> fact3(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg) {
  const auto s = finest(sb, bands, curve_key("skew", kind));
  const auto key = base_key("loss_fraction", kind, cfg);
  const LagCurve* lf = sb.find(key);
  if (!s || lf == nullptr) return std::nullopt;
  // Highest quantile level with enough exceedances in both the symbol and the band.
  std::optional<Point> f;
  for (std::size_t i = lf->grid.size(); i-- > 0 && !f;) f = point(lf, find_band(bands, key), lf->grid[i]);
  if (!f) return std::nullopt;
  return s->value < s->lo && f->value > f->hi;
}

std::optional<bool> fact4(const SymbolBattery& sb, const BandSet& bands, ClockKind kind) {
  const auto key = curve_key("kurtosis", kind);
  const auto p = finest(sb, bands, key);
  const LagCurve* c = sb.find(key);
  if (!p || c->grid.size() < 2) return std::nullopt;
  std::optional<double> coarsest;
  for (std::size_t i = c->grid.size(); i-- > 1;) {
    if (!std::isnan(c->values[i])) {
      coarsest = c->values[i];
      break;
    }
  }
  if (!coarsest) return std::nullopt;
  return p->value > p->hi && *coarsest < p->value;
}

std::optional<bool> fact5(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg) {
  const auto key = base_key("fano", kind, cfg);
  const auto p = point(sb.find(key), find_band(bands, key), cfg.extreme_quantile);
  if (!p) return std::nullopt;
  return p->value > p->hi;
}

std::optional<bool> fact6(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg,
                          const VerdictRules& rules) {
  const auto key = base_key("abs_acf", kind, cfg);
  const LagCurve* c = sb.find(key);
  const NoiseBand* band = find_band(bands, key);
  if (c == nullptr || band == nullptr) return std::nullopt;
  Fraction above;
  for (std::size_t tau = 1; tau <= rules.clustering_lags; ++tau) {
    const auto p = point(c, band, static_cast<double>(tau));
    if (!p) continue;
    ++above.total;
    if (p->value > p->hi) ++above.hits;
  }
  return above.at_least(rules.lag_fraction);
}

std::optional<bool> fact7(const SymbolBattery& sb, const BandSet& bands, ClockKind kind) {
  const auto norm = finest(sb, bands, curve_key("kurtosis_norm", kind));
  const LagCurve* raw = sb.find(curve_key("kurtosis", kind));
  if (!norm || raw == nullptr || raw->grid.empty() || std::isnan(raw->values.front())) return std::nullopt;
  return norm->value < raw->values.front() && norm->value > norm->hi;
}

std::optional<bool> fact8(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg,
                          const VerdictRules& rules) {
  const auto clustering = fact6(sb, bands, kind, cfg, rules);
  if (!clustering) return std::nullopt;
  const auto it = sb.fits.find(base_key("abs_acf", kind, cfg));
  if (!*clustering || it == sb.fits.end()) return false;
  const auto& fit = it->second;
  return fit.beta > rules.beta_min && fit.beta <= rules.beta_max && fit.r_squared >= rules.min_r_squared;
}

std::optional<bool> fact9(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg,
                          const VerdictRules& rules) {
  const std::string stat = cfg.leverage_measure == VolatilityMeasure::abs ? "leverage" : "leverage_sq";
  const auto key = base_key(stat, kind, cfg);
  const LagCurve* c = sb.find(key);
  const auto first = point(c, find_band(bands, key), 1.0);
  if (!first) return std::nullopt;
  Fraction asym;
  for (std::size_t tau = 1; tau <= cfg.leverage_tau_max; ++tau) {
    const auto pos = c->at(static_cast<double>(tau));
    const auto neg = c->at(-static_cast<double>(tau));
    if (!pos || !neg) continue;
    ++asym.total;
    if (*pos < *neg) ++asym.hits;
  }
  const auto lagged = asym.at_least(rules.lag_fraction);
  if (!lagged) return std::nullopt;
  return first->value < first->lo && *lagged;
}

std::optional<bool> fact10(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg) {
  const std::string stat = cfg.volume_measure == VolumeMeasure::shares ? "volume_volatility" : "trades_volatility";
  const auto key = base_key(stat, kind, cfg);
  const auto p = point(sb.find(key), find_band(bands, key), 0.0);
  if (!p) return std::nullopt;
  return p->value > p->hi;
}

std::optional<bool> fact11(const SymbolBattery& sb, const BandSet& bands, ClockKind kind, const BatteryConfig& cfg,
                           const VerdictRules& rules) {
  const std::string label =
      ClockSpec{kind, cfg.base(kind)}.scale_label() + ":" + ClockSpec{kind, cfg.coarse(kind)}.scale_label();
  const auto key = curve_key("asymmetry_D", kind, label);
  const LagCurve* c = sb.find(key);
  const NoiseBand* band = find_band(bands, key);
  for (std::size_t tau = 1; tau <= rules.asymmetry_lags; ++tau) {
    const auto p = point(c, band, static_cast<double>(tau));
    if (!p) return std::nullopt;
    if (!(p->value < p->lo)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::supported: return "supported";
    case Verdict::not_supported: return "not_supported";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

const char* rule_id(int fact) {
  switch (fact) {
    case 1: return "acf_lag1_outside_band_and_tail_small";
    case 2: return "kurtosis_finest_above_band";
    case 3: return "skew_below_band_and_loss_fraction_above_band";
    case 4: return "kurtosis_above_band_and_declining";
    case 5: return "fano_above_band";
    case 6: return "abs_acf_above_band_on_lag_fraction";
    case 7: return "normalized_kurtosis_reduced_but_above_band";
    case 8: return "clustering_and_power_law_exponent_in_window";
    case 9: return "leverage_lag1_below_band_and_lagged_asymmetry";
    case 10: return "volume_volatility_lag0_above_band";
    case 11: return "asymmetry_difference_below_band";
    default: return "unknown";
  }
}

std::vector<std::string> VerdictRules::problems() const {
  std::vector<std::string> out;
  if (!(symbol_fraction > 0.0 && symbol_fraction <= 1.0)) out.push_back("verdict.symbol_fraction must lie in (0, 1]");
  if (!(lag_fraction > 0.0 && lag_fraction <= 1.0)) out.push_back("verdict.lag_fraction must lie in (0, 1]");
  if (!(small_acf > 0.0)) out.push_back("verdict.small_acf must be positive");
  if (clustering_lags == 0) out.push_back("verdict.clustering_lags must be at least 1");
  if (!(beta_max > beta_min)) out.push_back("verdict.beta_max must exceed verdict.beta_min");
  if (asymmetry_lags == 0) out.push_back("verdict.asymmetry_lags must be at least 1");
  return out;
}

void VerdictRules::validate() const {
  const auto p = problems();
  if (!p.empty()) throw std::invalid_argument(p.front());
}

std::optional<bool> judge_symbol(int fact, ClockKind kind, const SymbolBattery& sb, const BandSet& bands,
                                 const BatteryConfig& cfg, const VerdictRules& rules) {
  switch (fact) {
    case 1: return fact1(sb, bands, kind, cfg, rules);
    case 2: return fact2(sb, bands, kind);
    case 3: return fact3(sb, bands, kind, cfg);
    case 4: return fact4(sb, bands, kind);
    case 5: return fact5(sb, bands, kind, cfg);
    case 6: return fact6(sb, bands, kind, cfg, rules);
    case 7: return fact7(sb, bands, kind);
    case 8: return fact8(sb, bands, kind, cfg, rules);
    case 9: return fact9(sb, bands, kind, cfg, rules);
    case 10: return fact10(sb, bands, kind, cfg);
    case 11: return fact11(sb, bands, kind, cfg, rules);
    default: return std::nullopt;
  }
}

std::vector<FactVerdict> judge(const std::vector<SymbolBattery>& batteries, const BandSet& bands,
                               const BatteryConfig& config, const VerdictRules& rules) {
  std::vector<FactVerdict> out;
  for (int fact = 1; fact <= kFactCount; ++fact) {
    FactVerdict fv;
    fv.fact = fact;
    fv.name = fact_name(fact);
    fv.rule = rule_id(fact);
    const bool enabled = config.has(fact);
    for (const auto& sb : batteries) {
      SymbolJudgement sj;
      sj.symbol = sb.symbol;
      if (enabled && config.clock_time) sj.clock = judge_symbol(fact, ClockKind::clock, sb, bands, config, rules);
      if (enabled && config.event_time) sj.event = judge_symbol(fact, ClockKind::event, sb, bands, config, rules);
      fv.symbols.push_back(std::move(sj));
    }
    auto aggregate = [&](bool on, auto member) {
      KindVerdict kv;
      if (!enabled || !on) return kv;
      kv.symbols = batteries.size();
      for (const auto& sj : fv.symbols) {
        const std::optional<bool>& j = sj.*member;
        if (!j) ++kv.undetermined;
        else if (*j) ++kv.supporting;
      }
      if (kv.symbols == 0 || kv.undetermined == kv.symbols) return kv;
      const double need = rules.symbol_fraction * static_cast<double>(kv.symbols);
      kv.verdict = static_cast<double>(kv.supporting) >= need - 1e-9 ? Verdict::supported : Verdict::not_supported;
      return kv;
    };
    fv.clock = aggregate(config.clock_time, &SymbolJudgement::clock);
    fv.event = aggregate(config.event_time, &SymbolJudgement::event);
    if (fv.clock.verdict == Verdict::supported || fv.event.verdict == Verdict::supported) {
      fv.overall = Verdict::supported;
    } else if (fv.clock.verdict == Verdict::not_supported || fv.event.verdict == Verdict::not_supported) {
      fv.overall = Verdict::not_supported;
    }
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace stylized
