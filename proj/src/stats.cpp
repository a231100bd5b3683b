#include "stylized/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stylized::stats {

namespace {

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

Moments central_moments(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  Moments m;
  m.mean = sum(xs) / n;
  CompensatedSum s2, s3, s4;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  m.m2 = s2.value() / n;
  m.m3 = s3.value() / n;
  m.m4 = s4.value() / n;
  return m;
}

double clamp_corr(double r) { return std::clamp(r, -1.0, 1.0); }

}  // namespace

double sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s += x;
  return s.value();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw UndefinedStatistic("mean of empty sample");
  return sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.empty()) throw UndefinedStatistic("variance of empty sample");
  return central_moments(xs).m2;
}

double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw UndefinedStatistic("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = sum(x) / n;
  const double my = sum(y) / n;
  CompensatedSum sxx, syy, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) throw UndefinedStatistic("pearson: constant input");
  return clamp_corr(sxy.value() / std::sqrt(sxx.value() * syy.value()));
}

PairEstimate lagged_correlation(const DayLayout& layout, std::span<const double> x, std::span<const double> y,
                                std::ptrdiff_t lag) {
  if (x.size() != y.size()) throw std::invalid_argument("lagged_correlation: length mismatch");
  const std::size_t abs_lag = static_cast<std::size_t>(lag < 0 ? -lag : lag);

  // Pairs (x[t], y[t + lag]) for t in [first, last) of each day.
  auto for_each_pair = [&](auto&& fn) {
    for (const DaySpan& day : layout) {
      if (day.count <= abs_lag) continue;
      const std::size_t n = day.count - abs_lag;
      const double* xp = x.data() + day.offset + (lag < 0 ? abs_lag : 0);
      const double* yp = y.data() + day.offset + (lag > 0 ? abs_lag : 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double a = xp[i];
        const double b = yp[i];
        if (std::isnan(a) || std::isnan(b)) continue;
        fn(a, b);
      }
    }
  };

  std::size_t count = 0;
  CompensatedSum sx, sy;
  for_each_pair([&](double a, double b) {
    ++count;
    sx += a;
    sy += b;
  });
  PairEstimate out;
  out.n_obs = count;
  if (count < 2) return out;
  const double mx = sx.value() / static_cast<double>(count);
  const double my = sy.value() / static_cast<double>(count);
  CompensatedSum sxx, syy, sxy;
  for_each_pair([&](double a, double b) {
    const double dx = a - mx;
    const double dy = b - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  });
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) return out;
  out.value = clamp_corr(sxy.value() / std::sqrt(sxx.value() * syy.value()));
  return out;
}

PairEstimate acf(const DayLayout& layout, std::span<const double> values, std::size_t lag) {
  return lagged_correlation(layout, values, values, static_cast<std::ptrdiff_t>(lag));
}

double excess_kurtosis(std::span<const double> xs) {
  if (xs.size() < 4) throw UndefinedStatistic("kurtosis: need at least four points");
  const Moments m = central_moments(xs);
  if (m.m2 <= 0.0) throw UndefinedStatistic("kurtosis: zero variance");
  return m.m4 / (m.m2 * m.m2) - 3.0;
}

double skew(std::span<const double> xs) {
  if (xs.size() < 3) throw UndefinedStatistic("skew: need at least three points");
  const Moments m = central_moments(xs);
  if (m.m2 <= 0.0) throw UndefinedStatistic("skew: zero variance");
  return m.m3 / (m.m2 * std::sqrt(m.m2));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> xs, double q) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, q);
}

double fano(std::span<const std::int64_t> counts) {
  if (counts.empty()) throw UndefinedStatistic("fano: no windows");
  const double n = static_cast<double>(counts.size());
  CompensatedSum s;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("fano: negative count");
    s += static_cast<double>(c);
  }
  const double m = s.value() / n;
  if (m <= 0.0) throw UndefinedStatistic("fano: zero mean count");
  CompensatedSum v;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - m;
    v += d * d;
  }
  return (v.value() / n) / m;
}

double rogers_satchell(const Ohlc& bar) {
  if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
    throw std::invalid_argument("rogers_satchell: prices must be positive");
  }
  if (bar.high < std::max(bar.open, bar.close) || bar.low > std::min(bar.open, bar.close)) {
    throw std::invalid_argument("rogers_satchell: high/low do not bracket open/close");
  }
  const double v = std::log(bar.high / bar.open) * std::log(bar.high / bar.close) +
                   std::log(bar.low / bar.open) * std::log(bar.low / bar.close);
  return std::sqrt(std::max(v, 0.0));
}

PowerLawFit loglog_slope(std::span<const double> grid, std::span<const double> values, double fit_min,
                         double fit_max) {
  if (grid.size() != values.size()) throw std::invalid_argument("loglog_slope: length mismatch");
  if (!(fit_min > 0.0) || fit_max < fit_min) throw std::invalid_argument("loglog_slope: bad fit range");
  std::vector<double> lx, ly;
  double first = fit_min;
  double last = fit_min;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < fit_min || grid[i] > fit_max) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) break;
    if (lx.empty()) first = grid[i];
    lx.push_back(std::log(grid[i]));
    ly.push_back(std::log(values[i]));
    last = grid[i];
  }
  if (lx.size() < 2) throw UndefinedStatistic("loglog_slope: fewer than two positive points in range");

  const double n = static_cast<double>(lx.size());
  const double mx = sum(lx) / n;
  const double my = sum(ly) / n;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx.value() <= 0.0) throw UndefinedStatistic("loglog_slope: degenerate lag grid");
  const double slope = sxy.value() / sxx.value();
  PowerLawFit fit;
  fit.beta = -slope;
  fit.intercept = my - slope * mx;
  fit.fit_min = first;
  fit.fit_max = last;
  fit.points = lx.size();
  CompensatedSum ssr;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + slope * lx[i]);
    ssr += r * r;
  }
  fit.r_squared = syy.value() > 0.0 ? 1.0 - ssr.value() / syy.value() : 1.0;
  return fit;
}

}  // namespace stylized::stats
