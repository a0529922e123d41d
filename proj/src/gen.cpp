#include "agrisk/gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agrisk/errors.hpp"
#include "agrisk/rng.hpp"

namespace agrisk {
namespace {

enum Stream : std::uint64_t { kYetStream = 1, kXeltStream = 2, kPortfolioStream = 3 };

void require_valid(const GenSpec& spec) {
  const auto issues = validate(spec);
  if (issues.empty()) return;
  std::string msg = "invalid generator spec:";
  for (const auto& i : issues) msg += "\n  " + i;
  throw ValidationError(msg);
}

std::size_t draw_count(Xoshiro256& rng, CountRange r) { return r.lo + rng.below(r.hi - r.lo + 1); }

// Floyd's sampling of k distinct values from [0, n), returned ascending.
std::vector<std::size_t> distinct_sorted(Xoshiro256& rng, std::size_t n, std::size_t k) {
  std::vector<std::uint8_t> taken(n, 0);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = rng.below(j + 1);
    if (taken[t]) {
      taken[j] = 1;
    } else {
      taken[t] = 1;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (taken[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<std::string> validate(const GenSpec& spec) {
  std::vector<std::string> out;
  const auto counts = [&](const char* name, CountRange r, std::size_t min_lo) {
    if (r.lo < min_lo) out.push_back(std::string(name) + " lower bound must be at least " + std::to_string(min_lo));
    if (r.lo > r.hi) out.push_back(std::string(name) + " range is empty");
  };
  const auto reals = [&](const char* name, RealRange r) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo < 0.0) {
      out.push_back(std::string(name) + " must be finite and non-negative");
    }
    if (r.lo > r.hi) out.push_back(std::string(name) + " range is empty");
  };
  if (spec.num_trials < 1) out.push_back("num_trials must be at least 1");
  counts("events_per_trial", spec.events_per_trial, 1);
  if (spec.catalogue_size < 1) out.push_back("catalogue_size must be at least 1");
  if (spec.catalogue_size > std::numeric_limits<EventId>::max()) out.push_back("catalogue_size exceeds event id range");
  if (spec.num_xelts < 1) out.push_back("num_xelts must be at least 1");
  counts("records_per_xelt", spec.records_per_xelt, 1);
  if (spec.records_per_xelt.hi > spec.catalogue_size) out.push_back("records_per_xelt exceeds catalogue_size");
  reals("mean_loss", spec.mean_loss);
  if (!(spec.mean_loss.hi > 0.0)) out.push_back("mean_loss range must include positive values");
  reals("sigma_i_fraction", spec.sigma_i_fraction);
  reals("sigma_c_fraction", spec.sigma_c_fraction);
  if (!(spec.max_loss_multiplier > 1.0) || !std::isfinite(spec.max_loss_multiplier)) {
    out.push_back("max_loss_multiplier must be finite and greater than 1");
  }
  if (spec.num_programs < 1) out.push_back("num_programs must be at least 1");
  if (spec.layers_per_program < 1) out.push_back("layers_per_program must be at least 1");
  counts("xelts_per_layer", spec.xelts_per_layer, 1);
  if (spec.xelts_per_layer.hi > spec.num_xelts) out.push_back("xelts_per_layer exceeds num_xelts");
  return out;
}

YearEventTable generate_yet(const GenSpec& spec) {
  require_valid(spec);
  const std::uint64_t base = derive_seed(spec.seed, kYetStream);
  YearEventTable yet(spec.catalogue_size);
  const std::size_t mean_events = (spec.events_per_trial.lo + spec.events_per_trial.hi) / 2;
  yet.reserve(spec.num_trials, spec.num_trials * mean_events);
  std::vector<EventOccurrence> trial;
  for (std::size_t i = 0; i < spec.num_trials; ++i) {
    Xoshiro256 rng(derive_seed(base, spec.first_trial + i));
    trial.resize(draw_count(rng, spec.events_per_trial));
    for (auto& occ : trial) {
      occ.event_id = static_cast<EventId>(rng.below(spec.catalogue_size));
      occ.timestamp = rng.uniform();
      occ.z_prog_e = rng.uniform();
    }
    std::sort(trial.begin(), trial.end(), [](const EventOccurrence& a, const EventOccurrence& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      if (a.event_id != b.event_id) return a.event_id < b.event_id;
      return a.z_prog_e < b.z_prog_e;
    });
    yet.add_trial(trial);
  }
  return yet;
}

XeltSet generate_xelts(const GenSpec& spec) {
  require_valid(spec);
  const std::uint64_t base = derive_seed(spec.seed, kXeltStream);
  XeltSet out(spec.num_xelts);
  for (std::size_t x = 0; x < spec.num_xelts; ++x) {
    Xoshiro256 rng(derive_seed(base, x));
    const std::size_t n = draw_count(rng, spec.records_per_xelt);
    const auto ids = distinct_sorted(rng, spec.catalogue_size, n);
    auto& records = out[x];
    records.reserve(n);
    for (std::size_t id : ids) {
      XeltRecord r;
      r.event_id = static_cast<EventId>(id);
      r.mean_loss = rng.uniform(spec.mean_loss.lo, spec.mean_loss.hi);
      r.z_e = rng.uniform();
      r.sigma_i = rng.uniform(spec.sigma_i_fraction.lo, spec.sigma_i_fraction.hi) * r.mean_loss;
      r.sigma_c = rng.uniform(spec.sigma_c_fraction.lo, spec.sigma_c_fraction.hi) * r.mean_loss;
      r.max_loss = spec.max_loss_multiplier * r.mean_loss;
      // A zero mean still needs a positive cap.
      if (r.max_loss <= 0.0) r.max_loss = spec.max_loss_multiplier * spec.mean_loss.hi;
      records.push_back(r);
    }
  }
  return out;
}

Portfolio generate_portfolio(const GenSpec& spec) {
  require_valid(spec);
  Xoshiro256 rng(derive_seed(spec.seed, kPortfolioStream));
  const double mean_loss = 0.5 * (spec.mean_loss.lo + spec.mean_loss.hi);
  const double hit_rate = 0.5 * static_cast<double>(spec.records_per_xelt.lo + spec.records_per_xelt.hi) /
                          static_cast<double>(spec.catalogue_size);
  const double events = 0.5 * static_cast<double>(spec.events_per_trial.lo + spec.events_per_trial.hi);

  Portfolio pf;
  pf.programs.resize(spec.num_programs);
  for (auto& program : pf.programs) {
    program.layers.resize(spec.layers_per_program);
    for (auto& layer : program.layers) {
      const std::size_t k = draw_count(rng, spec.xelts_per_layer);
      layer.xelt_ids = distinct_sorted(rng, spec.num_xelts, k);
      for (std::size_t j = 0; j < k; ++j) {
        if (spec.xelt_terms) {
          layer.xelt_terms.push_back({rng.uniform(0.0, 0.05) * mean_loss,
                                      rng.uniform(0.5, 1.0) * spec.max_loss_multiplier * spec.mean_loss.hi,
                                      1.0 - 0.5 * rng.uniform()});
        } else {
          layer.xelt_terms.push_back(XeltTerms::identity());
        }
      }
      // Terms scale with the expected loss to the layer.
      const double expected_event = static_cast<double>(k) * hit_rate * mean_loss;
      const double expected_year = events * expected_event;
      layer.terms.occ_retention = rng.uniform(0.0, 0.5) * mean_loss;
      layer.terms.occ_limit = rng.uniform(2.0, 4.0) * mean_loss;
      layer.terms.agg_retention = rng.uniform(0.0, 0.25) * expected_year;
      layer.terms.agg_limit = rng.uniform(1.0, 2.0) * expected_year;
    }
  }
  return pf;
}

}  // namespace agrisk
