#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <unistd.h>

#include "agrisk/rng.hpp"

namespace fixtures {

using namespace agrisk;

namespace {

XeltRecord random_record(Xoshiro256& rng, EventId e) {
  XeltRecord r;
  r.event_id = e;
  r.max_loss = rng.uniform(10.0, 200.0);
  r.z_e = rng.uniform();
  switch (rng.below(8)) {
    case 0:  // sigma = 0
      r.mean_loss = rng.uniform(0.0, r.max_loss);
      break;
    case 1:
      r.mean_loss = 0.0;
      r.sigma_i = rng.uniform(0.0, 10.0);
      break;
    case 2:
      r.mean_loss = r.max_loss;
      r.sigma_c = rng.uniform(0.0, 10.0);
      break;
    default:
      r.mean_loss = rng.uniform(0.05, 0.95) * r.max_loss;
      r.sigma_i = rng.below(4) == 0 ? 0.0 : rng.uniform(0.0, 0.5) * r.mean_loss;
      r.sigma_c = rng.below(4) == 0 ? 0.0 : rng.uniform(0.0, 0.5) * r.mean_loss;
      break;
  }
  return r;
}

}  // namespace

Case random_case(std::uint64_t seed, const SmallLimits& lim) {
  Xoshiro256 rng(seed);
  Case c;
  c.catalogue = lim.catalogue;

  const std::size_t nx = 1 + rng.below(lim.max_xelts);
  c.xelts.resize(nx);
  for (auto& list : c.xelts) {
    for (EventId e = 0; e < lim.catalogue; ++e) {
      if (rng.uniform() < 0.5) list.push_back(random_record(rng, e));
    }
  }

  c.yet = YearEventTable(lim.catalogue);
  const std::size_t trials = 1 + rng.below(lim.max_trials);
  std::vector<EventOccurrence> trial;
  for (std::size_t t = 0; t < trials; ++t) {
    trial.resize(rng.below(lim.max_events + 1));
    for (auto& o : trial) {
      o.event_id = static_cast<EventId>(rng.below(lim.catalogue));
      o.timestamp = rng.uniform();
      o.z_prog_e = rng.uniform();
    }
    std::sort(trial.begin(), trial.end(),
              [](const EventOccurrence& a, const EventOccurrence& b) { return a.timestamp < b.timestamp; });
    c.yet.add_trial(trial);
  }

  std::size_t layers_left = 1 + rng.below(lim.max_layers);
  while (layers_left > 0) {
    Program prog;
    const std::size_t n = 1 + rng.below(layers_left);
    for (std::size_t l = 0; l < n; ++l) {
      Layer layer;
      std::vector<std::size_t> ids(nx);
      for (std::size_t i = 0; i < nx; ++i) ids[i] = i;
      const std::size_t take = 1 + rng.below(nx);
      for (std::size_t i = 0; i < take; ++i) std::swap(ids[i], ids[i + rng.below(nx - i)]);
      ids.resize(take);
      for (std::size_t id : ids) {
        layer.xelt_ids.push_back(id);
        if (rng.below(3) == 0) {
          layer.xelt_terms.push_back(XeltTerms::identity());
        } else {
          layer.xelt_terms.push_back({rng.uniform(0.0, 20.0), rng.uniform(20.0, 150.0), rng.uniform(0.1, 1.0)});
        }
      }
      layer.terms.occ_retention = rng.uniform(0.0, 30.0);
      layer.terms.occ_limit = rng.below(4) == 0 ? kUnlimited : rng.uniform(20.0, 200.0);
      layer.terms.agg_retention = rng.uniform(0.0, 100.0);
      layer.terms.agg_limit = rng.below(4) == 0 ? kUnlimited : rng.uniform(50.0, 500.0);
      prog.layers.push_back(std::move(layer));
    }
    layers_left -= n;
    c.pf.programs.push_back(std::move(prog));
  }
  return c;
}

Case tiny_case() {
  SmallLimits lim;
  lim.max_layers = 1;
  lim.max_xelts = 4;
  lim.max_trials = 1;
  lim.max_events = 10;
  lim.catalogue = 50;
  // First seed giving four XELTs with at least three in the layer.
  Case c;
  for (std::uint64_t seed = 1;; ++seed) {
    c = random_case(seed, lim);
    if (c.xelts.size() == 4 && c.pf.programs.front().layers.front().xelt_ids.size() >= 3) break;
  }
  Xoshiro256 rng(7);
  c.yet = YearEventTable(lim.catalogue);
  std::vector<EventOccurrence> trial;
  for (std::size_t t = 0; t < 200; ++t) {
    trial.resize(rng.below(11));
    for (auto& o : trial) {
      o.event_id = static_cast<EventId>(rng.below(lim.catalogue));
      o.timestamp = rng.uniform();
      o.z_prog_e = rng.uniform();
    }
    std::sort(trial.begin(), trial.end(),
              [](const EventOccurrence& a, const EventOccurrence& b) { return a.timestamp < b.timestamp; });
    c.yet.add_trial(trial);
  }
  return c;
}

std::vector<double> probability_grid(std::size_t n, double lo) {
  const double t0 = std::log(lo / (1.0 - lo));
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 * (1.0 - 2.0 * static_cast<double>(i) / static_cast<double>(n - 1));
    g[i] = 1.0 / (1.0 + std::exp(-t));
  }
  return g;
}

std::vector<double> log_grid(std::size_t n, double lo, double hi) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("agrisk_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
