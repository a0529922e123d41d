#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "agrisk/model.hpp"

namespace agrisk {

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct CountRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Shape of a synthetic dataset. Defaults follow the benchmark configuration:
// one layer over 16 XELTs, 1,000 events per trial, a 1,000,000-event
// catalogue and 10,000-30,000 records per XELT. The loss-scale defaults
// (sigma_i = 0.5 mean, sigma_c = 0.3 mean, max = 4 mean) are arbitrary.
struct GenSpec {
  std::uint64_t seed = 42;
  std::size_t num_trials = 1000;
  // Index of the first generated trial. Trial t is a function of (seed, t)
  // only, so a large table can be produced in independent batches.
  std::size_t first_trial = 0;
  CountRange events_per_trial{1000, 1000};
  std::size_t catalogue_size = 1'000'000;
  std::size_t num_xelts = 16;
  CountRange records_per_xelt{10'000, 30'000};
  RealRange mean_loss{1.0e4, 1.0e6};
  RealRange sigma_i_fraction{0.5, 0.5};
  RealRange sigma_c_fraction{0.3, 0.3};
  double max_loss_multiplier = 4.0;
  std::size_t num_programs = 1;
  std::size_t layers_per_program = 1;
  CountRange xelts_per_layer{16, 16};
  bool xelt_terms = true;
};

// Every violated constraint; empty when the GenSpec is usable.
std::vector<std::string> validate(const GenSpec& spec);

// All three throw ValidationError for an invalid spec.
YearEventTable generate_yet(const GenSpec& spec);
XeltSet generate_xelts(const GenSpec& spec);
Portfolio generate_portfolio(const GenSpec& spec);

}  // namespace agrisk
