#include "agrisk/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "agrisk/errors.hpp"
#include "agrisk/uncertainty.hpp"

namespace agrisk {

TrialError::TrialError(const ConvergenceError& cause, std::size_t layer_index, std::size_t trial_id,
                       std::size_t event_position, std::size_t xelt_id)
    : ConvergenceError(std::string(cause.what()) + " [layer " + std::to_string(layer_index) + ", trial " +
                           std::to_string(trial_id) + ", event position " + std::to_string(event_position) +
                           ", xelt " + std::to_string(xelt_id) + "]",
                       cause.last_iterate(), cause.residual()),
      layer_index_(layer_index),
      trial_id_(trial_id),
      event_position_(event_position),
      xelt_id_(xelt_id) {}

double apply_occurrence_terms(double loss, const LayerTerms& terms) noexcept {
  return std::min(std::max(loss - terms.occ_retention, 0.0), terms.occ_limit);
}

double apply_aggregate_terms(double cumulative_loss, const LayerTerms& terms) noexcept {
  return std::min(std::max(cumulative_loss - terms.agg_retention, 0.0), terms.agg_limit);
}

double apply_xelt_terms(double loss, const XeltTerms& terms) noexcept {
  return terms.share * std::min(std::max(loss - terms.retention, 0.0), terms.limit);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

// A present (event, xelt) pair found during lookup.
struct Hit {
  std::uint32_t trial_local;
  std::uint32_t event_position;
  std::uint32_t xelt_slot;
  const LossSlot* record;
  double z_prog_e;
};

template <typename Real>
struct LayerTermsT {
  Real occ_retention, occ_limit, agg_retention, agg_limit;

  explicit LayerTermsT(const LayerTerms& t)
      : occ_retention(static_cast<Real>(t.occ_retention)),
        occ_limit(static_cast<Real>(t.occ_limit)),
        agg_retention(static_cast<Real>(t.agg_retention)),
        agg_limit(static_cast<Real>(t.agg_limit)) {}
};

template <typename Real>
struct XeltTermsT {
  Real retention, limit, share;
};

// Per-worker scratch space, reused across chunks.
template <typename Real>
struct Scratch {
  std::vector<Hit> hits;
  std::vector<Real> losses;
  std::vector<const LossSlot*> rows;
  std::vector<XeltTermsT<Real>> xelt_terms;
  PhaseTimes phases;
};

// One layer over trials [first, last). Runs lookup, secondary uncertainty and
// financial terms as separate passes so each can be timed without per-item
// clock reads. Summation order is XELT order within an event, then event
// order within a trial, independent of chunking.
template <typename Real>
void simulate_chunk(const YearEventTable& yet, const Layer& layer, std::size_t layer_index, const LossTable& table,
                    const EngineConfig& cfg, std::size_t first, std::size_t last, std::span<double> out,
                    Scratch<Real>& scratch) {
  const auto t0 = Clock::now();
  auto& hits = scratch.hits;
  hits.clear();
  const std::size_t nx = layer.xelt_ids.size();
  auto& row = scratch.rows;
  row.resize(nx);
  for (std::size_t j = 0; j < nx; ++j) row[j] = table.row(layer.xelt_ids[j]);

  for (std::size_t t = first; t < last; ++t) {
    const auto trial = yet.trial(t);
    for (std::size_t k = 0; k < trial.size(); ++k) {
      const EventId e = trial[k].event_id;
      for (std::size_t j = 0; j < nx; ++j) {
        const LossSlot& s = row[j][e];
        if (s.present()) {
          hits.push_back({static_cast<std::uint32_t>(t - first), static_cast<std::uint32_t>(k),
                          static_cast<std::uint32_t>(j), &s, trial[k].z_prog_e});
        }
      }
    }
  }
  const auto t1 = Clock::now();

  auto& losses = scratch.losses;
  losses.resize(hits.size());
  if (cfg.secondary_uncertainty_enabled) {
    for (std::size_t h = 0; h < hits.size(); ++h) {
      try {
        losses[h] = static_cast<Real>(apply_secondary_uncertainty(*hits[h].record, hits[h].z_prog_e, cfg.precision));
      } catch (const ConvergenceError& err) {
        throw TrialError(err, layer_index, first + hits[h].trial_local, hits[h].event_position,
                         layer.xelt_ids[hits[h].xelt_slot]);
      }
    }
  } else {
    for (std::size_t h = 0; h < hits.size(); ++h) losses[h] = static_cast<Real>(hits[h].record->mean_loss);
  }
  const auto t2 = Clock::now();

  const LayerTermsT<Real> lt(layer.terms);
  auto& xterms = scratch.xelt_terms;
  xterms.resize(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const XeltTerms& x = layer.xelt_terms[j];
    xterms[j] = {static_cast<Real>(x.retention), static_cast<Real>(x.limit), static_cast<Real>(x.share)};
  }
  const Real zero = 0;
  const auto occ = [&](Real l) { return std::min(std::max(l - lt.occ_retention, zero), lt.occ_limit); };
  const auto agg = [&](Real l) { return std::min(std::max(l - lt.agg_retention, zero), lt.agg_limit); };

  std::size_t h = 0;
  for (std::size_t t = first; t < last; ++t) {
    const auto local = static_cast<std::uint32_t>(t - first);
    Real cumulative = 0;
    Real year = agg(cumulative);
    while (h < hits.size() && hits[h].trial_local == local) {
      const std::uint32_t pos = hits[h].event_position;
      Real event_loss = 0;
      for (; h < hits.size() && hits[h].trial_local == local && hits[h].event_position == pos; ++h) {
        Real l = losses[h];
        if (cfg.xelt_terms_enabled) {
          const auto& xt = xterms[hits[h].xelt_slot];
          l = xt.share * std::min(std::max(l - xt.retention, zero), xt.limit);
        }
        event_loss += l;
      }
      cumulative += occ(event_loss);
      if (cfg.aggregate_mode == AggregateMode::kRunning) year = agg(cumulative);
    }
    if (cfg.aggregate_mode == AggregateMode::kEndOfTrial) year = agg(cumulative);
    out[t] = static_cast<double>(year);
  }
  const auto t3 = Clock::now();

  scratch.phases.lookup_ms += ms_between(t0, t1);
  scratch.phases.secondary_uncertainty_ms += ms_between(t1, t2);
  scratch.phases.financial_terms_ms += ms_between(t2, t3);
}

void require_valid(const Portfolio& pf, const YearEventTable& yet, const LossTable& table) {
  std::string msg;
  for (const auto& f : validate_portfolio(pf, table)) msg += "\n  " + f.path + ": " + f.message;
  if (yet.catalogue_size() > table.catalogue_size()) {
    msg += "\n  year event table catalogue (" + std::to_string(yet.catalogue_size()) +
           ") larger than loss table catalogue (" + std::to_string(table.catalogue_size()) + ")";
  }
  const auto yet_issues = yet.validate();
  for (std::size_t i = 0; i < yet_issues.size() && i < 20; ++i) msg += "\n  " + yet_issues[i];
  if (!msg.empty()) throw ValidationError("inputs failed validation:" + msg);
}

template <typename Real>
RunResult run_typed(const Portfolio& pf, const YearEventTable& yet, const LossTable& table,
                    const EngineConfig& cfg) {
  RunResult result;
  std::vector<const Layer*> layers;
  for (std::size_t p = 0; p < pf.programs.size(); ++p) {
    for (std::size_t l = 0; l < pf.programs[p].layers.size(); ++l) {
      result.layers.push_back({p, l, std::vector<double>(yet.num_trials(), 0.0)});
      layers.push_back(&pf.programs[p].layers[l]);
    }
  }

  const std::size_t trials = yet.num_trials();
  const std::size_t chunk = cfg.chunk_size;
  const std::size_t chunks_per_layer = (trials + chunk - 1) / chunk;
  const std::size_t work_items = chunks_per_layer * layers.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.num_workers, std::max<std::size_t>(work_items, 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<Scratch<Real>> scratch(workers);

  const auto worker = [&](std::size_t w) {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t item = next.fetch_add(1, std::memory_order_relaxed);
      if (item >= work_items) return;
      const std::size_t li = item / chunks_per_layer;
      const std::size_t first = (item % chunks_per_layer) * chunk;
      const std::size_t last = std::min(first + chunk, trials);
      try {
        simulate_chunk<Real>(yet, *layers[li], li, table, cfg, first, last, result.layers[li].losses, scratch[w]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const auto start = Clock::now();
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
  }
  result.phases.total_ms = ms_between(start, Clock::now());
  if (error) std::rethrow_exception(error);

  for (const auto& s : scratch) {
    result.phases.lookup_ms += s.phases.lookup_ms;
    result.phases.secondary_uncertainty_ms += s.phases.secondary_uncertainty_ms;
    result.phases.financial_terms_ms += s.phases.financial_terms_ms;
  }
  const auto n = static_cast<double>(workers);
  result.phases.lookup_ms /= n;
  result.phases.secondary_uncertainty_ms /= n;
  result.phases.financial_terms_ms /= n;
  return result;
}

}  // namespace

double simulate_trial(std::span<const EventOccurrence> trial, const Layer& layer, const LossTable& table,
                      const EngineConfig& cfg) {
  if (layer.xelt_terms.size() != layer.xelt_ids.size()) {
    throw ValidationError("simulate_trial: xelt_terms count does not match xelt_ids");
  }
  for (std::size_t id : layer.xelt_ids) {
    if (id >= table.num_xelts()) throw ValidationError("simulate_trial: xelt index out of range");
  }
  for (const auto& occ : trial) {
    if (occ.event_id >= table.catalogue_size()) throw ValidationError("simulate_trial: event id out of range");
  }
  YearEventTable single(table.catalogue_size());
  single.add_trial(trial);
  double out = 0.0;
  if (cfg.precision == Precision::kSingle) {
    Scratch<float> scratch;
    simulate_chunk<float>(single, layer, 0, table, cfg, 0, 1, std::span<double>(&out, 1), scratch);
  } else {
    Scratch<double> scratch;
    simulate_chunk<double>(single, layer, 0, table, cfg, 0, 1, std::span<double>(&out, 1), scratch);
  }
  return out;
}

RunResult run_portfolio(const Portfolio& pf, const YearEventTable& yet, const LossTable& table,
                        const EngineConfig& cfg) {
  if (cfg.num_workers < 1) throw ValidationError("num_workers must be at least 1");
  if (cfg.chunk_size < 1) throw ValidationError("chunk_size must be at least 1");
  require_valid(pf, yet, table);
  if (cfg.precision == Precision::kSingle) return run_typed<float>(pf, yet, table, cfg);
  return run_typed<double>(pf, yet, table, cfg);
}

std::vector<double> portfolio_rollup(std::span<const YearLossTable> ylts) {
  if (ylts.empty()) return {};
  std::vector<double> out(ylts.front().losses.size(), 0.0);
  for (const auto& y : ylts) {
    if (y.losses.size() != out.size()) throw ValidationError("year loss tables differ in length");
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += y.losses[t];
  }
  return out;
}

}  // namespace agrisk
