#include "agrisk/bench.hpp"

#include <algorithm>
#include <array>
#include <ostream>

#include "agrisk/errors.hpp"

namespace agrisk {
namespace {

constexpr std::array<const char*, 4> kPhases{"lookup", "secondary_uncertainty", "financial_terms", "total"};

double phase_value(const PhaseTimes& p, std::size_t i) {
  switch (i) {
    case 0: return p.lookup_ms;
    case 1: return p.secondary_uncertainty_ms;
    case 2: return p.financial_terms_ms;
    default: return p.total_ms;
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const BenchRow* BenchReport::find(std::size_t workers, std::size_t trials, const std::string& phase) const {
  for (const auto& r : rows) {
    if (r.workers == workers && r.trials == trials && r.phase == phase) return &r;
  }
  return nullptr;
}

PhaseTimes time_trials(const BenchConfig& cfg, const Portfolio& pf, const LossTable& table, std::size_t trials,
                       std::size_t workers) {
  EngineConfig ec;
  ec.num_workers = workers;
  ec.chunk_size = cfg.chunk_size;
  ec.precision = cfg.precision;
  PhaseTimes sum;
  for (std::size_t first = 0; first < trials; first += cfg.batch_trials) {
    GenSpec batch = cfg.spec;
    batch.first_trial = cfg.spec.first_trial + first;
    batch.num_trials = std::min(cfg.batch_trials, trials - first);
    const YearEventTable yet = generate_yet(batch);
    const RunResult r = run_portfolio(pf, yet, table, ec);
    sum.lookup_ms += r.phases.lookup_ms;
    sum.secondary_uncertainty_ms += r.phases.secondary_uncertainty_ms;
    sum.financial_terms_ms += r.phases.financial_terms_ms;
    sum.total_ms += r.phases.total_ms;
  }
  return sum;
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.trials.empty() || cfg.workers.empty()) throw ValidationError("bench needs at least one trial count and one worker count");
  if (cfg.repeats < 1) throw ValidationError("repeats must be at least 1");
  if (cfg.batch_trials < 1) throw ValidationError("batch size must be at least 1");
  for (auto t : cfg.trials) {
    if (t < 1) throw ValidationError("trial counts must be positive");
  }
  for (auto w : cfg.workers) {
    if (w < 1) throw ValidationError("worker counts must be positive");
  }

  const XeltSet xelts = generate_xelts(cfg.spec);
  const LossTable table = build_loss_table(xelts, cfg.spec.catalogue_size);
  const Portfolio pf = generate_portfolio(cfg.spec);

  if (cfg.warmup_trials > 0) {
    time_trials(cfg, pf, table, std::min(cfg.warmup_trials, cfg.batch_trials), cfg.workers.front());
  }

  BenchReport report;
  for (std::size_t trials : cfg.trials) {
    for (std::size_t workers : cfg.workers) {
      std::array<std::vector<double>, kPhases.size()> samples;
      for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const PhaseTimes p = time_trials(cfg, pf, table, trials, workers);
        for (std::size_t i = 0; i < kPhases.size(); ++i) samples[i].push_back(phase_value(p, i));
      }
      for (std::size_t i = 0; i < kPhases.size(); ++i) {
        BenchRow row;
        row.workers = workers;
        row.trials = trials;
        row.phase = kPhases[i];
        row.min_ms = *std::min_element(samples[i].begin(), samples[i].end());
        row.median_ms = median(samples[i]);
        report.rows.push_back(row);
      }
    }
  }
  for (auto& row : report.rows) {
    if (row.workers == 1) {
      row.speedup = 1.0;
    } else if (const BenchRow* base = report.find(1, row.trials, row.phase); base && row.median_ms > 0.0) {
      row.speedup = base->median_ms / row.median_ms;
    }
  }
  return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << "workers,trials,phase,min_ms,median_ms,speedup\n";
  for (const auto& r : report.rows) {
    out << r.workers << ',' << r.trials << ',' << r.phase << ',' << r.min_ms << ',' << r.median_ms << ','
        << r.speedup << '\n';
  }
}

}  // namespace agrisk
