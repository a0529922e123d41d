#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agrisk/errors.hpp"
#include "agrisk/gen.hpp"
#include "agrisk/io.hpp"
#include "agrisk/rng.hpp"

using namespace agrisk;

namespace {

GenSpec small_spec(std::uint64_t seed = 42) {
  GenSpec s;
  s.seed = seed;
  s.num_trials = 200;
  s.events_per_trial = {5, 50};
  s.catalogue_size = 10'000;
  s.num_xelts = 8;
  s.records_per_xelt = {100, 3000};
  s.num_programs = 3;
  s.layers_per_program = 2;
  s.xelts_per_layer = {3, 8};
  return s;
}

std::string bytes_of(const YearEventTable& yet) {
  std::ostringstream out;
  io::write_yet(out, yet);
  return out.str();
}

}  // namespace

TEST_CASE("xoshiro256** reference output") {
  // Computed by an independent transcription of the published SplitMix64 and
  // xoshiro256** algorithms (state seeded with four SplitMix64(0) outputs).
  SplitMix64 sm(0);
  CHECK(sm.next() == 0xe220a8397b1dcdafULL);
  Xoshiro256 rng(0);
  CHECK(rng.next() == 0x99ec5f36cb75f2b4ULL);
  CHECK(rng.next() == 0xbf6e1f784956452aULL);
  CHECK(rng.next() == 0x1a5f849d4933e6e0ULL);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(7) < 7);
  }
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("generation is deterministic") {
  const GenSpec s = small_spec();
  CHECK(bytes_of(generate_yet(s)) == bytes_of(generate_yet(s)));
  CHECK(generate_xelts(s) == generate_xelts(s));
  CHECK(generate_portfolio(s) == generate_portfolio(s));
  CHECK_FALSE(generate_yet(s) == generate_yet(small_spec(43)));
}

TEST_CASE("trials can be generated in batches") {
  GenSpec s = small_spec();
  const YearEventTable whole = generate_yet(s);
  s.num_trials = 80;
  s.first_trial = 120;
  const YearEventTable tail = generate_yet(s);
  for (std::size_t t = 0; t < 80; ++t) {
    CHECK(std::ranges::equal(tail.trial(t), whole.trial(120 + t)));
  }
}

TEST_CASE("generated YET satisfies its invariants") {
  const GenSpec s = small_spec();
  const YearEventTable yet = generate_yet(s);
  CHECK(yet.num_trials() == 200);
  CHECK(yet.catalogue_size() == 10'000);
  CHECK(yet.validate().empty());
  for (std::size_t t = 0; t < yet.num_trials(); ++t) {
    CHECK(yet.trial(t).size() >= 5);
    CHECK(yet.trial(t).size() <= 50);
  }
}

TEST_CASE("event ids are uniform over the catalogue") {
  GenSpec s;
  s.num_trials = 1000;
  const YearEventTable yet = generate_yet(s);
  REQUIRE(yet.num_occurrences() == 1'000'000);
  std::vector<double> bins(100, 0.0);
  for (std::size_t t = 0; t < yet.num_trials(); ++t) {
    for (const auto& o : yet.trial(t)) bins[o.event_id * 100 / s.catalogue_size] += 1.0;
  }
  const double expected = 1'000'000.0 / 100.0;
  double chi2 = 0.0;
  for (double b : bins) chi2 += (b - expected) * (b - expected) / expected;
  // chi-square upper 1% point, 99 degrees of freedom
  CHECK(chi2 < 134.642);
}

TEST_CASE("generated records satisfy their invariants") {
  const GenSpec s = small_spec();
  const XeltSet xelts = generate_xelts(s);
  REQUIRE(xelts.size() == 8);
  for (const auto& list : xelts) {
    CHECK(list.size() >= 100);
    CHECK(list.size() <= 3000);
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(record_violation(list[i]).empty());
      CHECK(list[i].mean_loss <= list[i].max_loss);
      CHECK(list[i].event_id < s.catalogue_size);
      if (i > 0) CHECK(list[i - 1].event_id < list[i].event_id);
    }
  }
  CHECK_NOTHROW(build_loss_table(xelts, s.catalogue_size));
}

TEST_CASE("zero sigma fractions give degenerate records") {
  GenSpec s = small_spec();
  s.sigma_i_fraction = {0.0, 0.0};
  s.sigma_c_fraction = {0.0, 0.0};
  for (const auto& list : generate_xelts(s)) {
    for (const auto& r : list) {
      CHECK(r.sigma_i == 0.0);
      CHECK(r.sigma_c == 0.0);
    }
  }
}

TEST_CASE("default spec has the benchmark shape") {
  const GenSpec s;
  CHECK(s.events_per_trial.lo == 1000);
  CHECK(s.events_per_trial.hi == 1000);
  CHECK(s.catalogue_size == 1'000'000);
  CHECK(s.num_xelts == 16);
  const Portfolio pf = generate_portfolio(s);
  REQUIRE(pf.programs.size() == 1);
  REQUIRE(pf.programs[0].layers.size() == 1);
  CHECK(pf.programs[0].layers[0].xelt_ids.size() == 16);
}

TEST_CASE("generated terms satisfy their invariants on 1000 seeds") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Portfolio pf = generate_portfolio(small_spec(seed));
    CHECK(pf.num_layers() == 6);
    for (const auto& prog : pf.programs) {
      for (const auto& layer : prog.layers) {
        const LayerTerms& t = layer.terms;
        CHECK((std::isfinite(t.occ_retention) && t.occ_retention >= 0.0));
        CHECK((std::isfinite(t.agg_retention) && t.agg_retention >= 0.0));
        CHECK((std::isfinite(t.occ_limit) && t.occ_limit > 0.0));
        CHECK((std::isfinite(t.agg_limit) && t.agg_limit > 0.0));
        REQUIRE(layer.xelt_terms.size() == layer.xelt_ids.size());
        for (const auto& xt : layer.xelt_terms) {
          CHECK(xt.retention >= 0.0);
          CHECK(xt.limit > 0.0);
          CHECK((xt.share > 0.0 && xt.share <= 1.0));
        }
      }
    }
  }
}

TEST_CASE("generated data passes portfolio validation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GenSpec s = small_spec(seed);
    const LossTable table = build_loss_table(generate_xelts(s), s.catalogue_size);
    CHECK(validate_portfolio(generate_portfolio(s), table).empty());
  }
}

TEST_CASE("invalid specs are rejected") {
  GenSpec s = small_spec();
  s.events_per_trial = {0, 0};
  CHECK_FALSE(validate(s).empty());
  CHECK_THROWS_AS(generate_yet(s), ValidationError);

  s = small_spec();
  s.records_per_xelt = {10, s.catalogue_size + 1};
  CHECK_THROWS_AS(generate_xelts(s), ValidationError);

  s = small_spec();
  s.max_loss_multiplier = 1.0;
  CHECK_THROWS_AS(generate_xelts(s), ValidationError);

  s = small_spec();
  s.num_trials = 0;
  CHECK_THROWS_AS(generate_yet(s), ValidationError);

  s = small_spec();
  s.xelts_per_layer = {2, 9};
  CHECK_THROWS_AS(generate_portfolio(s), ValidationError);

  s = small_spec();
  s.mean_loss = {5.0, 1.0};
  CHECK_FALSE(validate(s).empty());
  CHECK(validate(small_spec()).empty());
}
