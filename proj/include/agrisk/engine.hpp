#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "agrisk/model.hpp"
#include "agrisk/statfuncs.hpp"

namespace agrisk {

// When aggregate terms are evaluated within a trial. kRunning clips the
// cumulative occurrence loss after every event; kEndOfTrial clips once.
enum class AggregateMode { kRunning, kEndOfTrial };

struct EngineConfig {
  std::size_t num_workers = 1;
  // Trials per work unit.
  std::size_t chunk_size = 32;
  Precision precision = Precision::kDouble;
  bool xelt_terms_enabled = true;
  // When false, looked-up records contribute their mean loss unsampled
  // (primary uncertainty only).
  bool secondary_uncertainty_enabled = true;
  AggregateMode aggregate_mode = AggregateMode::kRunning;
};

// Wall-clock attribution of a run. Phase figures are summed over workers and
// divided by the worker count.
struct PhaseTimes {
  double lookup_ms = 0.0;
  double secondary_uncertainty_ms = 0.0;
  double financial_terms_ms = 0.0;
  double total_ms = 0.0;
};

// Year losses for one layer, indexed by trial id.
struct YearLossTable {
  std::size_t program = 0;
  std::size_t layer = 0;
  std::vector<double> losses;

  friend bool operator==(const YearLossTable&, const YearLossTable&) = default;
};

struct RunResult {
  // One entry per layer, programs in order, layers in order.
  std::vector<YearLossTable> layers;
  PhaseTimes phases;
};

double apply_occurrence_terms(double loss, const LayerTerms& terms) noexcept;
double apply_aggregate_terms(double cumulative_loss, const LayerTerms& terms) noexcept;
double apply_xelt_terms(double loss, const XeltTerms& terms) noexcept;

// Year loss of one trial against one layer.
double simulate_trial(std::span<const EventOccurrence> trial, const Layer& layer, const LossTable& table,
                      const EngineConfig& cfg = {});

// Runs every layer of the portfolio over every trial. Throws ValidationError
// if the inputs do not validate and TrialError on a sampling failure.
// Output does not depend on num_workers or chunk_size.
RunResult run_portfolio(const Portfolio& pf, const YearEventTable& yet, const LossTable& table,
                        const EngineConfig& cfg);

// Per-trial sum across all layers.
std::vector<double> portfolio_rollup(std::span<const YearLossTable> ylts);

}  // namespace agrisk
