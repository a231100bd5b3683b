#include "stylized/facts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stylized {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LagCurve make_curve(std::string stat_id, const ReturnSeries& rs, std::string scale_label) {
  LagCurve c;
  c.stat_id = std::move(stat_id);
  c.symbol = rs.symbol;
  c.kind = rs.clock.kind;
  c.scale_label = std::move(scale_label);
  return c;
}

std::vector<double> abs_values(std::span<const double> xs) {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), [](double v) { return std::abs(v); });
  return out;
}

template <class Estimator>
auto try_estimate(Estimator&& est) -> std::optional<decltype(est())> {
  try {
    return est();
  } catch (const stats::UndefinedStatistic&) {
    return std::nullopt;
  }
}

}  // namespace

std::string curve_key(std::string_view stat_id, ClockKind kind, std::string_view scale_label) {
  std::string key(stat_id);
  key += kind == ClockKind::clock ? "/clock" : "/event";
  if (!scale_label.empty()) {
    key += '/';
    key += scale_label;
  }
  return key;
}

std::string LagCurve::key() const { return curve_key(stat_id, kind, scale_label); }

std::optional<std::size_t> LagCurve::index_of(double x) const {
  const auto it = std::find(grid.begin(), grid.end(), x);
  if (it == grid.end()) return std::nullopt;
  return static_cast<std::size_t>(it - grid.begin());
}

std::optional<double> LagCurve::at(double x) const {
  const auto i = index_of(x);
  if (!i || std::isnan(values[*i])) return std::nullopt;
  return values[*i];
}

void LagCurve::push(double x, std::optional<double> v, std::size_t n) {
  grid.push_back(x);
  values.push_back(v.value_or(kNaN));
  n_obs.push_back(n);
}

LagCurve linear_acf(const ReturnSeries& rs, std::size_t tau_max) {
  LagCurve c = make_curve("acf", rs, rs.clock.scale_label());
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    const auto est = stats::acf(rs.days, rs.values, tau);
    c.push(static_cast<double>(tau), est.value, est.n_obs);
  }
  return c;
}

LagCurve kurtosis_curve(std::span<const ReturnSeries> by_scale, std::string stat_id) {
  if (by_scale.empty()) throw std::invalid_argument("kurtosis_curve: no scales");
  LagCurve c = make_curve(std::move(stat_id), by_scale.front(), "");
  for (const auto& rs : by_scale) {
    const auto xs = rs.present();
    c.push(rs.clock.natural_scale(), try_estimate([&] { return stats::excess_kurtosis(xs); }), xs.size());
  }
  return c;
}

LagCurve kurtosis_curve(const SymbolTape& tape, const SessionCalendar& calendar, ClockKind kind,
                        std::span<const std::int64_t> scales, bool normalized, SlotScale slot_scale) {
  std::vector<ReturnSeries> series;
  series.reserve(scales.size());
  for (auto scale : scales) {
    auto rs = log_returns(build_series(tape, ClockSpec{kind, scale}, calendar));
    series.push_back(normalized ? normalize_returns(rs, slot_scale) : std::move(rs));
  }
  return kurtosis_curve(series, normalized ? "kurtosis_norm" : "kurtosis");
}

LagCurve skew_curve(std::span<const ReturnSeries> by_scale) {
  if (by_scale.empty()) throw std::invalid_argument("skew_curve: no scales");
  LagCurve c = make_curve("skew", by_scale.front(), "");
  for (const auto& rs : by_scale) {
    const auto xs = rs.present();
    c.push(rs.clock.natural_scale(), try_estimate([&] { return stats::skew(xs); }), xs.size());
  }
  return c;
}

GainLossResult gain_loss(const ReturnSeries& rs, std::span<const double> quantiles, std::size_t min_exceedances) {
  GainLossResult out;
  out.loss_fraction = make_curve("loss_fraction", rs, rs.clock.scale_label());
  const auto xs = rs.present();
  out.skew = try_estimate([&] { return stats::skew(xs); });
  auto mags = abs_values(xs);
  std::sort(mags.begin(), mags.end());
  for (double q : quantiles) {
    if (mags.empty()) {
      out.loss_fraction.push(q, std::nullopt, 0);
      continue;
    }
    const double cutoff = stats::quantile_sorted(mags, q);
    std::size_t n = 0, losses = 0;
    for (double r : xs) {
      if (std::abs(r) > cutoff) {
        ++n;
        if (r < 0.0) ++losses;
      }
    }
    std::optional<double> frac;
    if (n >= min_exceedances && n > 0) frac = static_cast<double>(losses) / static_cast<double>(n);
    out.loss_fraction.push(q, frac, n);
  }
  return out;
}

IntermittencyResult intermittency(const ReturnSeries& rs, double q, std::size_t window_buckets) {
  if (window_buckets == 0) throw std::invalid_argument("intermittency: window must be positive");
  IntermittencyResult out;
  const auto xs = rs.present();
  if (xs.empty()) return out;
  out.threshold = stats::quantile(abs_values(xs), q);

  std::vector<std::int64_t> counts;
  std::vector<double> gaps;
  for (const auto& day : rs.days) {
    const std::size_t windows = day.count / window_buckets;
    for (std::size_t w = 0; w < windows; ++w) {
      std::int64_t n = 0;
      for (std::size_t i = w * window_buckets; i < (w + 1) * window_buckets; ++i) {
        const double v = rs.values[day.offset + i];
        if (!std::isnan(v) && std::abs(v) > out.threshold) ++n;
      }
      counts.push_back(n);
    }
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < day.count; ++i) {
      const double v = rs.values[day.offset + i];
      if (std::isnan(v) || !(std::abs(v) > out.threshold)) continue;
      ++out.extremes;
      if (prev) gaps.push_back(static_cast<double>(i - *prev));
      prev = i;
    }
  }
  out.windows = counts.size();
  out.gaps = gaps.size();
  out.fano = try_estimate([&] { return stats::fano(counts); });
  out.interarrival_kurtosis = try_estimate([&] { return stats::excess_kurtosis(gaps); });
  return out;
}

AbsAcfResult abs_acf(const ReturnSeries& rs, std::size_t tau_max, double fit_min, double fit_max) {
  AbsAcfResult out;
  const auto mags = abs_values(rs.values);
  out.abs_acf = make_curve("abs_acf", rs, rs.clock.scale_label());
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    const auto est = stats::acf(rs.days, mags, tau);
    out.abs_acf.push(static_cast<double>(tau), est.value, est.n_obs);
  }
  out.linear_acf = linear_acf(rs, tau_max);
  out.fit = try_estimate([&] { return stats::loglog_slope(out.abs_acf.grid, out.abs_acf.values, fit_min, fit_max); });

  std::size_t defined = 0, dominated = 0;
  out.dominates.assign(tau_max, 0);
  for (std::size_t i = 0; i < tau_max; ++i) {
    const double c0 = out.abs_acf.values[i];
    const double c = out.linear_acf.values[i];
    if (std::isnan(c0) || std::isnan(c)) continue;
    ++defined;
    if (c0 > std::abs(c)) {
      out.dominates[i] = 1;
      ++dominated;
    }
  }
  out.dominance_fraction = defined > 0 ? static_cast<double>(dominated) / static_cast<double>(defined) : 0.0;
  return out;
}

LagCurve leverage(const ReturnSeries& rs, std::size_t tau_max, VolatilityMeasure measure) {
  LagCurve c = make_curve(measure == VolatilityMeasure::abs ? "leverage" : "leverage_sq", rs, rs.clock.scale_label());
  std::vector<double> vol(rs.values.size());
  std::transform(rs.values.begin(), rs.values.end(), vol.begin(),
                 [measure](double v) { return measure == VolatilityMeasure::abs ? std::abs(v) : v * v; });
  const auto t = static_cast<std::ptrdiff_t>(tau_max);
  for (std::ptrdiff_t tau = -t; tau <= t; ++tau) {
    const auto est = stats::lagged_correlation(rs.days, rs.values, vol, tau);
    c.push(static_cast<double>(tau), est.value, est.n_obs);
  }
  return c;
}

LagCurve volume_volatility(const PriceSeries& ps, const ReturnSeries& rs, std::size_t tau_max,
                           VolumeMeasure measure) {
  if (ps.days != rs.days) throw std::invalid_argument("volume_volatility: price and return layouts differ");
  LagCurve c = make_curve(measure == VolumeMeasure::shares ? "volume_volatility" : "trades_volatility", rs,
                          rs.clock.scale_label());
  const auto vol = volume_values(ps, measure == VolumeMeasure::trades);
  const auto mags = abs_values(rs.values);
  const auto t = static_cast<std::ptrdiff_t>(tau_max);
  for (std::ptrdiff_t tau = -t; tau <= t; ++tau) {
    const auto est = stats::lagged_correlation(rs.days, vol, mags, tau);
    c.push(static_cast<double>(tau), est.value, est.n_obs);
  }
  return c;
}

LagCurve volume_acf(const PriceSeries& ps, std::size_t tau_max, VolumeMeasure measure) {
  LagCurve c;
  c.stat_id = measure == VolumeMeasure::shares ? "volume_acf" : "trades_acf";
  c.symbol = ps.symbol;
  c.kind = ps.clock.kind;
  c.scale_label = ps.clock.scale_label();
  const auto vol = volume_values(ps, measure == VolumeMeasure::trades);
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    const auto est = stats::acf(ps.days, vol, tau);
    c.push(static_cast<double>(tau), est.value, est.n_obs);
  }
  return c;
}

LagCurve asymmetry_difference(const LagCurve& a) {
  LagCurve d;
  d.stat_id = a.stat_id.ends_with("_A") ? a.stat_id.substr(0, a.stat_id.size() - 2) + "_D" : a.stat_id + "_D";
  d.symbol = a.symbol;
  d.kind = a.kind;
  d.scale_label = a.scale_label;
  double tau_max = 0.0;
  for (double x : a.grid) tau_max = std::max(tau_max, x);
  for (double tau = 1.0; tau <= tau_max; tau += 1.0) {
    const auto pos = a.index_of(tau);
    const auto neg = a.index_of(-tau);
    if (!pos || !neg) continue;
    const double v = a.values[*pos] - a.values[*neg];
    d.push(tau, std::isnan(v) ? std::nullopt : std::optional<double>(v), std::min(a.n_obs[*pos], a.n_obs[*neg]));
  }
  return d;
}

AsymmetryResult asymmetry(const ReturnSeries& fine, const ReturnSeries& coarse, std::size_t tau_max,
                          FineVolatility fine_vol, const PriceSeries* coarse_prices) {
  if (fine.clock.kind != coarse.clock.kind) throw std::invalid_argument("asymmetry: clock kinds differ");
  if (coarse.clock.scale % fine.clock.scale != 0 || coarse.clock.scale <= fine.clock.scale) {
    throw std::invalid_argument("asymmetry: coarse scale must be a multiple of the fine scale");
  }
  if (fine_vol == FineVolatility::rogers_satchell && (coarse_prices == nullptr || coarse_prices->days != coarse.days)) {
    throw std::invalid_argument("asymmetry: Rogers-Satchell variant needs the coarse price series");
  }
  const auto m = static_cast<std::size_t>(coarse.clock.scale / fine.clock.scale);

  // Fine volatility per coarse bucket, in the coarse layout.
  std::vector<double> fine_level(coarse.values.size(), kNaN);
  auto fine_day = fine.days.begin();
  for (const auto& cday : coarse.days) {
    while (fine_day != fine.days.end() && fine_day->date < cday.date) ++fine_day;
    const bool have_fine = fine_day != fine.days.end() && fine_day->date == cday.date;
    for (std::size_t t = 0; t < cday.count; ++t) {
      double& out = fine_level[cday.offset + t];
      if (fine_vol == FineVolatility::rogers_satchell) {
        const std::size_t k = cday.offset + t;
        if (coarse_prices->has_price(k)) {
          out = stats::rogers_satchell({coarse_prices->open[k], coarse_prices->high[k], coarse_prices->low[k],
                                        coarse_prices->close[k]});
        }
        continue;
      }
      if (!have_fine) continue;
      stats::CompensatedSum s;
      std::size_t n = 0;
      for (std::size_t j = t * m; j < std::min((t + 1) * m, fine_day->count); ++j) {
        const double v = fine.values[fine_day->offset + j];
        if (std::isnan(v)) continue;
        s += std::abs(v);
        ++n;
      }
      if (n > 0) out = s.value() / static_cast<double>(n);
    }
  }
  const auto coarse_abs = abs_values(coarse.values);

  const std::string label = fine.clock.scale_label() + ":" + coarse.clock.scale_label();
  AsymmetryResult out;
  out.a = make_curve(fine_vol == FineVolatility::mean_abs ? "asymmetry_A" : "asymmetry_rs_A", coarse, label);
  const auto t = static_cast<std::ptrdiff_t>(tau_max);
  for (std::ptrdiff_t tau = -t; tau <= t; ++tau) {
    const auto est = stats::lagged_correlation(coarse.days, fine_level, coarse_abs, tau);
    out.a.push(static_cast<double>(tau), est.value, est.n_obs);
  }
  out.d = asymmetry_difference(out.a);
  return out;
}

}  // namespace stylized
