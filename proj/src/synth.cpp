#include "stylized/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "stylized/parallel.hpp"

namespace stylized {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

SymbolTape generate_garch(const GenSpec& spec, double omega, double alpha, double beta) {
  const SessionCalendar calendar = synthetic_calendar(spec);
  const double variance = spec.trade_variance();
  const double sd = std::sqrt(variance);
  auto rng = make_rng(spec.seed);
  std::uniform_int_distribution<std::int64_t> offset_dist(0, calendar.session_length_ns() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  SymbolTape tape;
  tape.symbol = spec.symbol;
  tape.trades.reserve(spec.days * spec.trades_per_day);
  std::vector<std::int64_t> offsets(spec.trades_per_day);
  double log_price = std::log(spec.start_price);
  double sig2 = variance;
  double prev_r2 = variance;
  for (Date day : calendar.trading_days) {
    for (auto& o : offsets) o = offset_dist(rng);
    std::sort(offsets.begin(), offsets.end());
    const std::int64_t day_open = calendar.to_utc(day, calendar.session_open_ns);
    for (auto o : offsets) {
      sig2 = omega + alpha * prev_r2 + beta * sig2;
      const double r = std::sqrt(sig2) * normal(rng);
      prev_r2 = r * r;
      log_price += r;
      Trade t;
      t.ts_ns = day_open + o;
      t.price = std::exp(log_price);
      t.size = spec.size_coupling == 0.0
                   ? spec.base_size
                   : std::max<std::int64_t>(
                         1, std::llround(static_cast<double>(spec.base_size) *
                                         (1.0 + spec.size_coupling * std::abs(r) / sd)));
      tape.trades.push_back(t);
    }
  }
  return tape;
}

}  // namespace

void GenSpec::validate() const {
  if (days == 0) throw std::invalid_argument("synth.days must be at least 1");
  if (trades_per_day < 1) throw std::invalid_argument("synth.trades_per_day must be at least 1");
  if (!(return_variance > 0.0)) throw std::invalid_argument("synth.variance must be positive");
  if (!(start_price > 0.0)) throw std::invalid_argument("synth.start_price must be positive");
  if (base_size < 1) throw std::invalid_argument("synth.base_size must be at least 1");
  if (size_coupling < 0.0) throw std::invalid_argument("synth.size_coupling must be non-negative");
  if (kind == GenKind::clustering) {
    if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("synth.alpha and synth.beta must be non-negative");
    if (!(alpha + beta < 1.0)) {
      throw std::invalid_argument("synth: stationarity requires alpha + beta < 1");
    }
  }
}

double GenSpec::trade_stddev() const {
  return reading == VarianceReading::variance ? std::sqrt(return_variance) : return_variance;
}

double GenSpec::effective_omega() const {
  if (omega > 0.0) return omega;
  return trade_variance() * (1.0 - alpha - beta);
}

double GenSpec::trade_variance() const {
  return reading == VarianceReading::variance ? return_variance : return_variance * return_variance;
}

SessionCalendar synthetic_calendar(const GenSpec& spec) {
  SessionCalendar cal;
  cal.trading_days = weekdays_from(spec.first_day, spec.days);
  return cal;
}

SymbolTape gen_white_noise(const GenSpec& spec) {
  spec.validate();
  const double variance = spec.trade_variance();
  return generate_garch(spec, variance, 0.0, 0.0);
}

SymbolTape gen_clustering(const GenSpec& spec) {
  GenSpec checked = spec;
  checked.kind = GenKind::clustering;
  checked.validate();
  return generate_garch(spec, spec.effective_omega(), spec.alpha, spec.beta);
}

SymbolTape generate(const GenSpec& spec) {
  return spec.kind == GenKind::white_noise ? gen_white_noise(spec) : gen_clustering(spec);
}

std::optional<std::size_t> NoiseBand::index_of(double x) const {
  const auto it = std::find(grid.begin(), grid.end(), x);
  if (it == grid.end()) return std::nullopt;
  const auto i = static_cast<std::size_t>(it - grid.begin());
  if (std::isnan(lo[i]) || std::isnan(hi[i])) return std::nullopt;
  return i;
}

void accumulate_band(BandSet& bands, const std::vector<LagCurve>& curves) {
  for (const auto& c : curves) {
    const std::string key = c.key();
    auto [it, inserted] = bands.try_emplace(key);
    NoiseBand& band = it->second;
    if (inserted) {
      band.key = key;
      band.grid = c.grid;
      band.lo.assign(c.grid.size(), kNaN);
      band.hi.assign(c.grid.size(), kNaN);
      band.omitted.assign(c.grid.size(), 0);
    } else if (band.grid != c.grid) {
      throw std::invalid_argument("noise band grid mismatch for " + key);
    }
    ++band.replicates;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      const double v = c.values[i];
      if (std::isnan(v)) {
        ++band.omitted[i];
        continue;
      }
      band.lo[i] = std::isnan(band.lo[i]) ? v : std::min(band.lo[i], v);
      band.hi[i] = std::isnan(band.hi[i]) ? v : std::max(band.hi[i], v);
    }
  }
}

BandSet noise_bands(const ReplicateAnalyzer& analyzer, GenSpec base, std::size_t replicates, std::uint64_t seed,
                    std::size_t workers) {
  if (replicates == 0) throw std::invalid_argument("noise band needs at least one replicate");
  base.kind = GenKind::white_noise;
  base.validate();
  const SessionCalendar calendar = synthetic_calendar(base);
  std::vector<std::vector<LagCurve>> per_replicate(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    GenSpec spec = base;
    spec.seed = seed + r;
    const SymbolTape tape = gen_white_noise(spec);
    per_replicate[r] = analyzer(tape, calendar);
  });
  BandSet bands;
  for (const auto& curves : per_replicate) accumulate_band(bands, curves);
  for (auto& [key, band] : bands) band.seed = seed;
  return bands;
}

}  // namespace stylized
