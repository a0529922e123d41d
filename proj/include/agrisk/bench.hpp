#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "agrisk/engine.hpp"
#include "agrisk/gen.hpp"

namespace agrisk {

struct BenchConfig {
  GenSpec spec;
  std::vector<std::size_t> trials{200'000, 400'000, 800'000};
  std::vector<std::size_t> workers{1};
  std::size_t repeats = 1;
  // Trials run once, untimed, before measuring. 0 disables the warmup.
  std::size_t warmup_trials = 10'000;
  // Largest YET held in memory at once. Bigger runs are generated and
  // simulated in consecutive batches whose times are summed.
  std::size_t batch_trials = 25'000;
  std::size_t chunk_size = 32;
  Precision precision = Precision::kDouble;
};

struct BenchRow {
  std::size_t workers = 0;
  std::size_t trials = 0;
  // lookup, secondary_uncertainty, financial_terms or total
  std::string phase;
  double min_ms = 0.0;
  double median_ms = 0.0;
  // 1-worker median over this row's median, same trials and phase.
  // 0 when the sweep has no 1-worker run.
  double speedup = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  const BenchRow* find(std::size_t workers, std::size_t trials, const std::string& phase) const;
};

// Phase times of one engine pass over `trials` trials, generated in batches.
// Data generation and table construction are not timed.
PhaseTimes time_trials(const BenchConfig& cfg, const Portfolio& pf, const LossTable& table, std::size_t trials,
                       std::size_t workers);

BenchReport run_bench(const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, const BenchReport& report);

}  // namespace agrisk
