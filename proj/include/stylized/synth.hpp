#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylized/calendar.hpp"
#include "stylized/facts.hpp"
#include "stylized/tape.hpp"

namespace stylized {

enum class GenKind { white_noise, clustering };

/// How the second parameter of N(0, x) is read.
enum class VarianceReading { variance, stddev };

struct GenSpec {
  GenKind kind = GenKind::white_noise;
  std::size_t days = 103;
  std::size_t trades_per_day = 250'000;
  double return_variance = 1e-4;
  VarianceReading reading = VarianceReading::variance;
  // sigma^2_k = omega + alpha r^2_{k-1} + beta sigma^2_{k-1}; omega <= 0 means
  // "pick omega so the unconditional variance equals the return variance".
  double omega = 0.0;
  double alpha = 0.09;
  double beta = 0.90;
  double start_price = 100.0;
  std::int64_t base_size = 100;
  // size = base_size * (1 + coupling * |r| / sd); 0 keeps sizes constant.
  double size_coupling = 0.0;
  std::uint64_t seed = 0;
  Date first_day = Date::from_ymd(2018, 10, 18);
  std::string symbol = "SYN";

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
  [[nodiscard]] double trade_stddev() const;
  [[nodiscard]] double trade_variance() const;
  [[nodiscard]] double effective_omega() const;
};

/// Session calendar the generators draw timestamps from.
SessionCalendar synthetic_calendar(const GenSpec& spec);

/// iid normal trade-level log-returns; timestamps uniform over the session.
SymbolTape gen_white_noise(const GenSpec& spec);
/// GARCH(1,1) trade-level log-returns; timestamps as in gen_white_noise.
SymbolTape gen_clustering(const GenSpec& spec);
/// Dispatches on spec.kind.
SymbolTape generate(const GenSpec& spec);

/// Pointwise min/max envelope of one statistic over white-noise replicates.
struct NoiseBand {
  std::string key;
  std::vector<double> grid;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> omitted;  // replicates undefined at the point
  std::size_t replicates = 0;
  std::uint64_t seed = 0;

  /// Band index of grid value x, if present and defined.
  [[nodiscard]] std::optional<std::size_t> index_of(double x) const;
};

using BandSet = std::map<std::string, NoiseBand>;

/// Maps one replicate tape to the curves it produces, keyed by LagCurve::key().
using ReplicateAnalyzer = std::function<std::vector<LagCurve>(const SymbolTape&, const SessionCalendar&)>;

/// Runs `analyzer` on `replicates` white-noise tapes; replicate r uses seed + r.
BandSet noise_bands(const ReplicateAnalyzer& analyzer, GenSpec base, std::size_t replicates, std::uint64_t seed,
                    std::size_t workers = 1);

/// Folds one replicate's curves into a band set (used by noise_bands).
void accumulate_band(BandSet& bands, const std::vector<LagCurve>& curves);

}  // namespace stylized
