#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

// Scalar estimators shared by every analyzer. All moments are population
// moments (divide by n); all sums are compensated.

namespace stylized {

/// Contiguous run of buckets belonging to one trading day.
struct DaySpan {
  std::int32_t date = 0;  // Date::days
  std::size_t offset = 0;
  std::size_t count = 0;

  friend bool operator==(const DaySpan&, const DaySpan&) = default;
};

/// Day partition of a flat bucket array.
using DayLayout = std::vector<DaySpan>;

namespace stats {

/// Raised when an estimator is undefined on its input (zero variance, too few points).
class UndefinedStatistic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Neumaier's improved Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum(std::span<const double> xs);
double mean(std::span<const double> xs);
/// Population variance.
double variance(std::span<const double> xs);
/// Population standard deviation.
double stddev(std::span<const double> xs);

/// Pearson product-moment correlation. Throws UndefinedStatistic on constant or short input.
double pearson(std::span<const double> x, std::span<const double> y);

struct PairEstimate {
  std::optional<double> value;
  std::size_t n_obs = 0;
  [[nodiscard]] bool defined() const { return value.has_value(); }
};

/// corr(x[t], y[t+lag]) pooled over pairs whose two buckets share a day.
/// NaN entries mark absent buckets and are skipped. `lag` may be negative.
PairEstimate lagged_correlation(const DayLayout& layout, std::span<const double> x, std::span<const double> y,
                                std::ptrdiff_t lag);

/// C(lag) = corr(v[t], v[t+lag]) over within-day pairs.
PairEstimate acf(const DayLayout& layout, std::span<const double> values, std::size_t lag);

/// Standardized central fourth moment minus 3. Requires n >= 4 and non-zero variance.
double excess_kurtosis(std::span<const double> xs);
/// Standardized central third moment. Requires n >= 3 and non-zero variance.
double skew(std::span<const double> xs);

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::span<const double> xs, double q);
/// Same, on data already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double q);

/// Population variance over mean of event counts.
double fano(std::span<const std::int64_t> counts);

struct Ohlc {
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
};

/// sqrt(ln(H/O)ln(H/C) + ln(L/O)ln(L/C)). Throws std::invalid_argument on inconsistent bars.
double rogers_satchell(const Ohlc& bar);

struct PowerLawFit {
  double beta = 0.0;  // decay exponent, -slope of ln(value) on ln(lag)
  double intercept = 0.0;
  double fit_min = 0.0;
  double fit_max = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// OLS of ln(value) on ln(lag) over grid points inside [fit_min, fit_max].
/// The range is truncated before the first non-positive (or missing) value.
/// Throws UndefinedStatistic when fewer than two points remain.
PowerLawFit loglog_slope(std::span<const double> grid, std::span<const double> values, double fit_min,
                         double fit_max);

}  // namespace stats
}  // namespace stylized
