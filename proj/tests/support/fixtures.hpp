#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agrisk/model.hpp"

namespace fixtures {

struct SmallLimits {
  std::size_t max_layers = 3;
  std::size_t max_xelts = 4;
  std::size_t max_trials = 20;
  std::size_t max_events = 10;
  std::size_t catalogue = 24;
};

struct Case {
  agrisk::YearEventTable yet;
  agrisk::XeltSet xelts;
  agrisk::Portfolio pf;
  std::size_t catalogue = 0;
};

// Random small case. Layers total at most max_layers across programs; each
// XELT covers roughly half the catalogue. Records mix regular, zero-sigma,
// zero-mean and mean == max cases, and terms are drawn so that retentions
// and limits bind regularly.
Case random_case(std::uint64_t seed, const SmallLimits& lim = {});

// Fixed case behind the committed golden files.
Case tiny_case();

// n probabilities over (lo, 1 - lo), evenly spaced in logit so both tails
// are covered as densely as the middle.
std::vector<double> probability_grid(std::size_t n, double lo);

// n points log-spaced over [lo, hi], endpoints included.
std::vector<double> log_grid(std::size_t n, double lo, double hi);

// Scratch directory unique to this process, removed by the caller.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace fixtures
