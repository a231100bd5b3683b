#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stylized/series.hpp"
#include "stylized/stats.hpp"

namespace stylized {

/// A statistic evaluated over a lag or timescale grid. NaN values are gaps.
struct LagCurve {
  std::string stat_id;
  std::string symbol;
  ClockKind kind = ClockKind::clock;
  std::string scale_label;  // "1min", "1", "1min:30min", or "" for curves across scales
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<std::size_t> n_obs;

  /// "<stat>/<clock|event>[/<scale>]", the join key between curves and bands.
  [[nodiscard]] std::string key() const;
  [[nodiscard]] std::optional<double> at(double x) const;
  [[nodiscard]] std::optional<std::size_t> index_of(double x) const;
  void push(double x, std::optional<double> v, std::size_t n);
};

std::string curve_key(std::string_view stat_id, ClockKind kind, std::string_view scale_label = {});

// Fact 1: linear autocorrelation C(tau) for tau = 1..tau_max.
LagCurve linear_acf(const ReturnSeries& rs, std::size_t tau_max);

// Facts 2, 4, 7: excess kurtosis across timescales; one return series per scale.
LagCurve kurtosis_curve(std::span<const ReturnSeries> by_scale, std::string stat_id = "kurtosis");
LagCurve kurtosis_curve(const SymbolTape& tape, const SessionCalendar& calendar, ClockKind kind,
                        std::span<const std::int64_t> scales, bool normalized,
                        SlotScale slot_scale = SlotScale::mean_abs);
// Skew across timescales.
LagCurve skew_curve(std::span<const ReturnSeries> by_scale);

// Fact 3: skew plus the share of losses among returns beyond |r| quantile cutoffs.
struct GainLossResult {
  std::optional<double> skew;
  LagCurve loss_fraction;  // grid = quantile levels, n_obs = exceedances
};
GainLossResult gain_loss(const ReturnSeries& rs, std::span<const double> quantiles,
                         std::size_t min_exceedances = 20);

// Fact 5: Fano factor of extreme-return counts per coarse window and the
// kurtosis of within-day gaps (in buckets) between extremes.
struct IntermittencyResult {
  double threshold = 0.0;
  std::size_t extremes = 0;
  std::size_t windows = 0;
  std::size_t gaps = 0;
  std::optional<double> fano;
  std::optional<double> interarrival_kurtosis;
};
IntermittencyResult intermittency(const ReturnSeries& rs, double q, std::size_t window_buckets);

// Facts 6, 8: absolute-return ACF, its power-law fit, and dominance over |C(tau)|.
struct AbsAcfResult {
  LagCurve abs_acf;
  LagCurve linear_acf;
  std::optional<stats::PowerLawFit> fit;
  std::vector<std::uint8_t> dominates;  // C0(tau) > |C(tau)| per grid point
  double dominance_fraction = 0.0;
};
AbsAcfResult abs_acf(const ReturnSeries& rs, std::size_t tau_max, double fit_min, double fit_max);

// Fact 9: L(tau) = corr(r(t), vol(t + tau)) for tau in [-tau_max, tau_max].
enum class VolatilityMeasure { abs, squared };
LagCurve leverage(const ReturnSeries& rs, std::size_t tau_max, VolatilityMeasure measure = VolatilityMeasure::abs);

// Fact 10: corr(volume(t), |r(t + tau)|) for tau in [-tau_max, tau_max].
enum class VolumeMeasure { shares, trades };
LagCurve volume_volatility(const PriceSeries& ps, const ReturnSeries& rs, std::size_t tau_max,
                           VolumeMeasure measure = VolumeMeasure::shares);
/// Autocorrelation of per-bucket volume, tau = 1..tau_max.
LagCurve volume_acf(const PriceSeries& ps, std::size_t tau_max, VolumeMeasure measure = VolumeMeasure::trades);

// Fact 11: A(tau) = corr(fine volatility over coarse bucket T, |r_coarse(T + tau)|)
// and D(tau) = A(tau) - A(-tau).
enum class FineVolatility { mean_abs, rogers_satchell };
struct AsymmetryResult {
  LagCurve a;  // tau in [-tau_max, tau_max]
  LagCurve d;  // tau in [1, tau_max]
};
/// `coarse_prices` is required for the Rogers-Satchell variant.
AsymmetryResult asymmetry(const ReturnSeries& fine, const ReturnSeries& coarse, std::size_t tau_max,
                          FineVolatility fine_vol = FineVolatility::mean_abs,
                          const PriceSeries* coarse_prices = nullptr);
/// D from an A curve: the same subtraction the analyzer performs.
LagCurve asymmetry_difference(const LagCurve& a);

}  // namespace stylized
