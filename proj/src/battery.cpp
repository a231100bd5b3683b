#include "stylized/battery.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace stylized {

namespace {

struct Bundle {
  std::optional<PriceSeries> prices;
  ReturnSeries raw;
  std::optional<ReturnSeries> normalized;
};

class SeriesCache {
 public:
  SeriesCache(const SymbolTape& tape, const SessionCalendar& calendar, const BatteryConfig& config,
              SymbolBattery& out)
      : tape_(tape), calendar_(calendar), config_(config), out_(out) {}

  Bundle& get(ClockSpec spec) {
    auto it = cache_.find(spec);
    if (it != cache_.end()) return it->second;
    PriceSeries ps = build_series(tape_, spec, calendar_);
    Bundle b;
    b.raw = log_returns(ps);
    if (keep_prices(spec)) b.prices = std::move(ps);
    return cache_.emplace(spec, std::move(b)).first->second;
  }

  const ReturnSeries& raw(ClockSpec spec) { return get(spec).raw; }

  const ReturnSeries& normalized(ClockSpec spec) {
    Bundle& b = get(spec);
    if (!b.normalized) {
      NormalizeReport report;
      b.normalized = normalize_returns(b.raw, config_.slot_scale, &report);
      out_.normalization[std::string(spec.kind_label()) + "/" + spec.scale_label()] = report;
    }
    return *b.normalized;
  }

  const PriceSeries& prices(ClockSpec spec) {
    Bundle& b = get(spec);
    if (!b.prices) b.prices = build_series(tape_, spec, calendar_);
    return *b.prices;
  }

 private:
  bool keep_prices(ClockSpec spec) const {
    const bool base = spec.scale == config_.base(spec.kind);
    const bool coarse = spec.scale == config_.coarse(spec.kind);
    return (config_.has(10) && base) || (config_.has(11) && config_.rogers_satchell && coarse);
  }

  const SymbolTape& tape_;
  const SessionCalendar& calendar_;
  const BatteryConfig& config_;
  SymbolBattery& out_;
  std::map<ClockSpec, Bundle> cache_;
};

void store(SymbolBattery& out, LagCurve curve) {
  std::string key = curve.key();
  out.curves.insert_or_assign(std::move(key), std::move(curve));
}

LagCurve single_point(std::string stat_id, const ReturnSeries& rs, double x, std::optional<double> v,
                      std::size_t n) {
  LagCurve c;
  c.stat_id = std::move(stat_id);
  c.symbol = rs.symbol;
  c.kind = rs.clock.kind;
  c.scale_label = rs.clock.scale_label();
  c.push(x, v, n);
  return c;
}

template <class Fn>
void guarded(const std::string& symbol, int fact, Fn&& fn) {
  try {
    fn();
  } catch (const AnalyzerError&) {
    throw;
  } catch (const std::exception& e) {
    throw AnalyzerError(symbol, fact, e.what());
  }
}

void run_kind(ClockKind kind, SeriesCache& cache, const BatteryConfig& cfg, SymbolBattery& out) {
  const ClockSpec base{kind, cfg.base(kind)};
  const auto& scales = cfg.scales(kind);
  auto lag_series = [&]() -> const ReturnSeries& {
    return cfg.normalize_lags ? cache.normalized(base) : cache.raw(base);
  };

  std::optional<AbsAcfResult> abs_result;
  if (cfg.has(6) || cfg.has(8)) {
    guarded(out.symbol, 6, [&] {
      abs_result = abs_acf(lag_series(), cfg.abs_acf_tau_max, cfg.fit_min, cfg.fit_max);
      if (abs_result->fit) out.fits[abs_result->abs_acf.key()] = *abs_result->fit;
      store(out, abs_result->abs_acf);
    });
  }
  if (cfg.has(1)) {
    guarded(out.symbol, 1, [&] {
      if (abs_result && cfg.acf_tau_max == cfg.abs_acf_tau_max) {
        store(out, abs_result->linear_acf);
      } else {
        store(out, linear_acf(lag_series(), cfg.acf_tau_max));
      }
    });
  }
  abs_result.reset();

  if (cfg.has(2) || cfg.has(3) || cfg.has(4)) {
    guarded(out.symbol, 2, [&] {
      std::vector<ReturnSeries> by_scale;
      for (auto s : scales) by_scale.push_back(cache.raw({kind, s}));
      if (cfg.has(2) || cfg.has(4)) store(out, kurtosis_curve(by_scale));
      if (cfg.has(3)) store(out, skew_curve(by_scale));
    });
  }
  if (cfg.has(7)) {
    guarded(out.symbol, 7, [&] {
      std::vector<ReturnSeries> by_scale;
      for (auto s : scales) by_scale.push_back(cache.normalized({kind, s}));
      store(out, kurtosis_curve(by_scale, "kurtosis_norm"));
    });
  }
  if (cfg.has(3)) {
    guarded(out.symbol, 3, [&] {
      auto gl = gain_loss(cache.raw(base), cfg.loss_quantiles, cfg.min_exceedances);
      store(out, std::move(gl.loss_fraction));
    });
  }
  if (cfg.has(5)) {
    guarded(out.symbol, 5, [&] {
      const auto& rs = cache.raw(base);
      const auto window = static_cast<std::size_t>(cfg.window(kind) / cfg.base(kind));
      const auto res = intermittency(rs, cfg.extreme_quantile, window);
      store(out, single_point("fano", rs, cfg.extreme_quantile, res.fano, res.windows));
      store(out, single_point("interarrival_kurtosis", rs, cfg.extreme_quantile, res.interarrival_kurtosis,
                              res.gaps));
    });
  }
  if (cfg.has(9)) {
    guarded(out.symbol, 9, [&] { store(out, leverage(cache.raw(base), cfg.leverage_tau_max, cfg.leverage_measure)); });
  }
  if (cfg.has(10)) {
    guarded(out.symbol, 10, [&] {
      const auto& ps = cache.prices(base);
      store(out, volume_volatility(ps, cache.raw(base), cfg.volume_tau_max, cfg.volume_measure));
      store(out, volume_acf(ps, cfg.volume_tau_max, cfg.volume_measure));
    });
  }
  if (cfg.has(11)) {
    guarded(out.symbol, 11, [&] {
      const ClockSpec coarse{kind, cfg.coarse(kind)};
      auto res = asymmetry(cache.raw(base), cache.raw(coarse), cfg.asymmetry_tau_max);
      store(out, std::move(res.a));
      store(out, std::move(res.d));
      if (cfg.rogers_satchell) {
        auto rs = asymmetry(cache.raw(base), cache.raw(coarse), cfg.asymmetry_tau_max, FineVolatility::rogers_satchell,
                            &cache.prices(coarse));
        store(out, std::move(rs.a));
        store(out, std::move(rs.d));
      }
    });
  }
}

void check_scales(std::vector<std::string>& out, const std::vector<std::int64_t>& scales, const char* name,
                  bool required) {
  if (scales.empty()) {
    if (required) out.push_back(std::string(name) + " must not be empty");
    return;
  }
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] <= 0 || (i > 0 && scales[i] <= scales[i - 1])) {
      out.push_back(std::string(name) + " must be positive and increasing");
      return;
    }
  }
}

}  // namespace

std::vector<ClockKind> BatteryConfig::kinds() const {
  std::vector<ClockKind> out;
  if (clock_time) out.push_back(ClockKind::clock);
  if (event_time) out.push_back(ClockKind::event);
  return out;
}

std::vector<std::string> BatteryConfig::problems() const {
  std::vector<std::string> out;
  for (int f : facts) {
    if (f < 1 || f > kFactCount) out.push_back("facts.enabled: fact ids run from 1 to 11");
  }
  if (!clock_time && !event_time) out.push_back("facts: at least one of clock or event must be on");
  // Only the cross-scale facts (kurtosis and skew curves) read the scale lists.
  const bool cross_scale = has(2) || has(3) || has(4) || has(7);
  check_scales(out, clock_scales, "series.clock_scales", clock_time && cross_scale);
  check_scales(out, event_scales, "series.event_scales", event_time && cross_scale);
  if (clock_base <= 0) out.push_back("series.clock_base must be positive");
  if (event_base <= 0) out.push_back("series.event_base must be positive");
  if (acf_tau_max == 0) out.push_back("acf.tau_max must be at least 1");
  if (abs_acf_tau_max == 0) out.push_back("abs_acf.tau_max must be at least 1");
  if (!(fit_min > 0.0) || fit_max < fit_min) out.push_back("abs_acf.fit_min/fit_max: need 0 < min <= max");
  for (double q : loss_quantiles) {
    if (!(q > 0.0 && q < 1.0)) out.push_back("gain_loss.quantiles must lie in (0, 1)");
  }
  if (!(extreme_quantile > 0.0 && extreme_quantile < 1.0)) out.push_back("intermittency.quantile must lie in (0, 1)");
  for (ClockKind k : {ClockKind::clock, ClockKind::event}) {
    const char* name = k == ClockKind::clock ? "clock" : "event";
    if (window(k) <= 0 || window(k) % base(k) != 0) {
      out.push_back(std::string("intermittency.") + name + "_window must be a multiple of the base scale");
    }
    if (coarse(k) <= base(k) || coarse(k) % base(k) != 0) {
      out.push_back(std::string("asymmetry.") + name + "_coarse must be a larger multiple of the base scale");
    }
  }
  if (leverage_tau_max == 0) out.push_back("leverage.tau_max must be at least 1");
  if (volume_tau_max == 0) out.push_back("volume.tau_max must be at least 1");
  if (asymmetry_tau_max == 0) out.push_back("asymmetry.tau_max must be at least 1");
  return out;
}

void BatteryConfig::validate() const {
  const auto p = problems();
  if (!p.empty()) throw std::invalid_argument(p.front());
}

const LagCurve* SymbolBattery::find(const std::string& key) const {
  const auto it = curves.find(key);
  return it == curves.end() ? nullptr : &it->second;
}

SymbolBattery run_battery(const SymbolTape& tape, const SessionCalendar& calendar, const BatteryConfig& config) {
  SymbolBattery out;
  out.symbol = tape.symbol;
  for (ClockKind kind : config.kinds()) {
    // One cache per clock so a clock's series are freed before the next is built.
    SeriesCache cache(tape, calendar, config, out);
    run_kind(kind, cache, config, out);
  }
  return out;
}

std::vector<LagCurve> battery_curves(const SymbolBattery& battery) {
  std::vector<LagCurve> out;
  out.reserve(battery.curves.size());
  for (const auto& [key, curve] : battery.curves) out.push_back(curve);
  return out;
}

ReplicateAnalyzer battery_analyzer(BatteryConfig config) {
  return [config = std::move(config)](const SymbolTape& tape, const SessionCalendar& calendar) {
    return battery_curves(run_battery(tape, calendar, config));
  };
}

const char* fact_name(int fact) {
  switch (fact) {
    case 1: return "Lack of linear autocorrelation";
    case 2: return "Heavy tails";
    case 3: return "Gain/loss asymmetry";
    case 4: return "Aggregational Gaussianity";
    case 5: return "Intermittency";
    case 6: return "Volatility clustering";
    case 7: return "Conditional heavy tails";
    case 8: return "Slow decay of absolute autocorrelation";
    case 9: return "Leverage effect";
    case 10: return "Volume/volatility correlation";
    case 11: return "Asymmetry in timescales";
    default: return "unknown";
  }
}

}  // namespace stylized
