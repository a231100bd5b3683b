#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stylized/facts.hpp"
#include "stylized/series.hpp"
#include "stylized/synth.hpp"

namespace stylized {

inline constexpr int kFactCount = 11;

/// Parameters of every analyzer, for both clocks.
struct BatteryConfig {
  std::set<int> facts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  bool clock_time = true;
  bool event_time = true;

  std::vector<std::int64_t> clock_scales{1 * kNanosPerMinute,  5 * kNanosPerMinute,  10 * kNanosPerMinute,
                                         15 * kNanosPerMinute, 20 * kNanosPerMinute, 30 * kNanosPerMinute,
                                         60 * kNanosPerMinute};
  std::vector<std::int64_t> event_scales{1, 10, 100, 1000, 2500};
  // Scale of the lag-based analyzers (facts 1, 3, 5, 6, 8, 9, 10 and the fine side of 11).
  std::int64_t clock_base = kNanosPerMinute;
  std::int64_t event_base = 1;
  SlotScale slot_scale = SlotScale::mean_abs;
  // Run facts 1, 6 and 8 on normalized instead of raw returns.
  bool normalize_lags = false;

  std::size_t acf_tau_max = 100;
  std::size_t abs_acf_tau_max = 100;
  double fit_min = 1.0;
  double fit_max = 100.0;

  std::vector<double> loss_quantiles{0.9, 0.95, 0.99, 0.999};
  std::size_t min_exceedances = 20;

  double extreme_quantile = 0.99;
  std::int64_t clock_window = 30 * kNanosPerMinute;
  std::int64_t event_window = 1000;

  std::size_t leverage_tau_max = 20;
  VolatilityMeasure leverage_measure = VolatilityMeasure::abs;

  std::size_t volume_tau_max = 20;
  VolumeMeasure volume_measure = VolumeMeasure::shares;

  std::int64_t clock_coarse = 30 * kNanosPerMinute;
  std::int64_t event_coarse = 1000;
  std::size_t asymmetry_tau_max = 5;
  bool rogers_satchell = true;

  [[nodiscard]] bool has(int fact) const { return facts.count(fact) != 0; }
  [[nodiscard]] std::vector<ClockKind> kinds() const;
  [[nodiscard]] std::int64_t base(ClockKind kind) const { return kind == ClockKind::clock ? clock_base : event_base; }
  [[nodiscard]] const std::vector<std::int64_t>& scales(ClockKind kind) const {
    return kind == ClockKind::clock ? clock_scales : event_scales;
  }
  [[nodiscard]] std::int64_t window(ClockKind kind) const {
    return kind == ClockKind::clock ? clock_window : event_window;
  }
  [[nodiscard]] std::int64_t coarse(ClockKind kind) const {
    return kind == ClockKind::clock ? clock_coarse : event_coarse;
  }

  /// "section.key message" for each violated constraint.
  [[nodiscard]] std::vector<std::string> problems() const;
  /// Throws std::invalid_argument with the first problem.
  void validate() const;
};

/// Everything the battery produced for one symbol. Curves are keyed by LagCurve::key().
struct SymbolBattery {
  std::string symbol;
  std::map<std::string, LagCurve> curves;
  std::map<std::string, stats::PowerLawFit> fits;  // keyed like the abs_acf curve they fit
  std::map<std::string, NormalizeReport> normalization;  // keyed "clock/1min", "event/1"

  [[nodiscard]] const LagCurve* find(const std::string& key) const;
};

/// Error raised by an analyzer, tagged with where it happened.
class AnalyzerError : public std::runtime_error {
 public:
  AnalyzerError(std::string symbol, int fact, const std::string& what)
      : std::runtime_error(symbol + " fact " + std::to_string(fact) + ": " + what),
        symbol_(std::move(symbol)),
        fact_(fact) {}
  [[nodiscard]] const std::string& symbol() const { return symbol_; }
  [[nodiscard]] int fact() const { return fact_; }

 private:
  std::string symbol_;
  int fact_;
};

/// Runs every enabled analyzer on one session-filtered tape.
SymbolBattery run_battery(const SymbolTape& tape, const SessionCalendar& calendar, const BatteryConfig& config);

/// Curves of a battery run flattened in key order, for noise_bands.
std::vector<LagCurve> battery_curves(const SymbolBattery& battery);
ReplicateAnalyzer battery_analyzer(BatteryConfig config);

/// Stable short name for each fact id.
const char* fact_name(int fact);

}  // namespace stylized
