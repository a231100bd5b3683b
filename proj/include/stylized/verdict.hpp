#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stylized/battery.hpp"
#include "stylized/synth.hpp"

namespace stylized {

enum class Verdict { supported, not_supported, indeterminate };
const char* to_string(Verdict v);

/// Thresholds of the per-fact rules. A point is "above band" when it exceeds
/// the white-noise maximum at the same grid point.
struct VerdictRules {
  double symbol_fraction = 0.9;  // share of symbols that must support a fact
  double lag_fraction = 0.8;     // share of lags that must satisfy a lagwise condition
  // Fact 1: C(1) outside the band while |C(tau)| < small_acf beyond tau = acf_short_lags.
  double small_acf = 0.05;
  std::size_t acf_short_lags = 2;
  // Facts 6 and 8: lags 1..clustering_lags are inspected.
  std::size_t clustering_lags = 100;
  // Fact 8: power-law exponent window and goodness of fit.
  double beta_min = 0.0;
  double beta_max = 1.0;
  double min_r_squared = 0.5;
  // Fact 11: D(tau) below band for tau = 1..asymmetry_lags.
  std::size_t asymmetry_lags = 3;

  [[nodiscard]] std::vector<std::string> problems() const;
  void validate() const;
};

struct KindVerdict {
  Verdict verdict = Verdict::indeterminate;
  std::size_t symbols = 0;     // symbols judged
  std::size_t supporting = 0;  // symbols meeting the rule
  std::size_t undetermined = 0;
};

/// One symbol's outcome for one fact and clock; nullopt when data or band is missing.
struct SymbolJudgement {
  std::string symbol;
  std::optional<bool> clock;
  std::optional<bool> event;
};

struct FactVerdict {
  int fact = 0;
  std::string name;
  std::string rule;
  KindVerdict clock;
  KindVerdict event;
  Verdict overall = Verdict::indeterminate;
  std::vector<SymbolJudgement> symbols;
};

/// Identifier of the rule used for a fact.
const char* rule_id(int fact);

/// Applies the rules. Facts disabled in `config` or clocks switched off come out indeterminate.
std::vector<FactVerdict> judge(const std::vector<SymbolBattery>& batteries, const BandSet& bands,
                               const BatteryConfig& config, const VerdictRules& rules);

/// Per-symbol outcome; exposed for tests.
std::optional<bool> judge_symbol(int fact, ClockKind kind, const SymbolBattery& battery, const BandSet& bands,
                                 const BatteryConfig& config, const VerdictRules& rules);

}  // namespace stylized
