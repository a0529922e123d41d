#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "agrisk/engine.hpp"
#include "agrisk/errors.hpp"
#include "agrisk/gen.hpp"
#include "agrisk/rng.hpp"
#include "fixtures.hpp"
#include "reference_engine.hpp"

using namespace agrisk;

namespace {

constexpr double kLarge = 1e15;

Layer pass_through_layer(std::vector<std::size_t> ids) {
  Layer layer;
  layer.xelt_ids = ids;
  layer.xelt_terms.assign(ids.size(), XeltTerms::identity());
  layer.terms = {0.0, kLarge, 0.0, kLarge};
  return layer;
}

reference::Options ref_options(const EngineConfig& cfg) {
  return {cfg.xelt_terms_enabled, cfg.secondary_uncertainty_enabled, cfg.aggregate_mode};
}

}  // namespace

TEST_CASE("occurrence terms") {
  const LayerTerms t{20.0, 50.0, 0.0, kLarge};
  CHECK(apply_occurrence_terms(100.0, t) == 50.0);
  CHECK(apply_occurrence_terms(10.0, t) == 0.0);
  CHECK(apply_occurrence_terms(45.0, t) == 25.0);
}

TEST_CASE("aggregate terms") {
  const LayerTerms t{0.0, kLarge, 200.0, 500.0};
  CHECK(apply_aggregate_terms(1000.0, t) == 500.0);
  CHECK(apply_aggregate_terms(0.0, t) == 0.0);
  CHECK(apply_aggregate_terms(350.0, t) == 150.0);
}

TEST_CASE("xelt terms") {
  const XeltTerms t{10.0, 30.0, 0.5};
  CHECK(apply_xelt_terms(5.0, t) == 0.0);
  CHECK(apply_xelt_terms(25.0, t) == 7.5);
  CHECK(apply_xelt_terms(100.0, t) == 15.0);
  CHECK(apply_xelt_terms(123.0, XeltTerms::identity()) == 123.0);
}

TEST_CASE("simulate_trial examples") {
  const LossTable table = build_loss_table({{{4, 30.0, 0.5, 0.0, 0.0, 60.0}}}, 10);
  const Layer layer = pass_through_layer({0});
  CHECK(simulate_trial({}, layer, table) == 0.0);
  const std::vector<EventOccurrence> one{{4, 0.3, 0.9}};
  CHECK(simulate_trial(one, layer, table) == 30.0);

  // Three events, two XELTs, mixed degenerate and sampled records.
  const XeltSet xelts{{{1, 40.0, 0.2, 0.0, 0.0, 80.0}, {2, 25.0, 0.6, 5.0, 3.0, 100.0}},
                      {{1, 10.0, 0.5, 2.0, 0.0, 30.0}, {3, 0.0, 0.1, 1.0, 1.0, 50.0}}};
  const LossTable t2 = build_loss_table(xelts, 5);
  Layer l2;
  l2.xelt_ids = {0, 1};
  l2.xelt_terms = {{5.0, 30.0, 0.8}, XeltTerms::identity()};
  l2.terms = {3.0, 40.0, 10.0, 60.0};
  const std::vector<EventOccurrence> three{{1, 0.1, 0.3}, {2, 0.4, 0.8}, {3, 0.9, 0.5}};
  CHECK(simulate_trial(three, l2, t2) == reference::trial_loss(three, l2, xelts));
}

TEST_CASE("simulate_trial validates its inputs") {
  const LossTable table = build_loss_table({{{4, 30.0, 0.5, 0.0, 0.0, 60.0}}}, 10);
  const std::vector<EventOccurrence> bad{{10, 0.3, 0.9}};
  CHECK_THROWS_AS(simulate_trial(bad, pass_through_layer({0}), table), ValidationError);
  CHECK_THROWS_AS(simulate_trial({}, pass_through_layer({1}), table), ValidationError);
}

TEST_CASE("run_portfolio is sequential simulate_trial") {
  const auto c = fixtures::random_case(11, {1, 4, 10, 10, 24});
  REQUIRE(c.pf.num_layers() == 1);
  const LossTable table = build_loss_table(c.xelts, c.catalogue);
  EngineConfig cfg;
  const RunResult r = run_portfolio(c.pf, c.yet, table, cfg);
  REQUIRE(r.layers.size() == 1);
  REQUIRE(r.layers[0].losses.size() == c.yet.num_trials());
  for (std::size_t t = 0; t < c.yet.num_trials(); ++t) {
    CHECK(r.layers[0].losses[t] == simulate_trial(c.yet.trial(t), c.pf.programs[0].layers[0], table, cfg));
  }
}

TEST_CASE("run_portfolio equals the reference engine bit for bit") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = fixtures::random_case(seed);
    const LossTable table = build_loss_table(c.xelts, c.catalogue);
    for (int variant = 0; variant < 4; ++variant) {
      EngineConfig cfg;
      cfg.num_workers = 1 + seed % 3;
      cfg.chunk_size = 1 + seed % 5;
      cfg.xelt_terms_enabled = variant != 1;
      cfg.secondary_uncertainty_enabled = variant != 2;
      cfg.aggregate_mode = variant == 3 ? AggregateMode::kEndOfTrial : AggregateMode::kRunning;
      const RunResult r = run_portfolio(c.pf, c.yet, table, cfg);
      const auto ref = reference::run(c.pf, c.yet, c.xelts, ref_options(cfg));
      INFO("seed " << seed << " variant " << variant);
      CHECK(r.layers == ref);
    }
  }
}

TEST_CASE("output does not depend on workers or chunking") {
  GenSpec s;
  s.num_trials = 300;
  s.events_per_trial = {50, 150};
  s.catalogue_size = 5000;
  s.num_xelts = 6;
  s.records_per_xelt = {500, 1500};
  s.num_programs = 2;
  s.layers_per_program = 2;
  s.xelts_per_layer = {2, 5};
  const auto yet = generate_yet(s);
  const LossTable table = build_loss_table(generate_xelts(s), s.catalogue_size);
  const auto pf = generate_portfolio(s);
  EngineConfig base;
  const auto expected = run_portfolio(pf, yet, table, base).layers;
  for (std::size_t workers : {1u, 2u, 3u, 8u}) {
    for (std::size_t chunk : {1u, 7u, 32u, 1000u}) {
      EngineConfig cfg;
      cfg.num_workers = workers;
      cfg.chunk_size = chunk;
      CHECK(run_portfolio(pf, yet, table, cfg).layers == expected);
    }
  }
}

TEST_CASE("running and end-of-trial aggregation agree") {
  // The aggregate clip is monotone and occurrence losses are non-negative,
  // so clipping the running sum after each event ends at the same value as
  // one clip at the end of the trial.
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto c = fixtures::random_case(seed);
    const LossTable table = build_loss_table(c.xelts, c.catalogue);
    EngineConfig running;
    EngineConfig end;
    end.aggregate_mode = AggregateMode::kEndOfTrial;
    CHECK(run_portfolio(c.pf, c.yet, table, running).layers == run_portfolio(c.pf, c.yet, table, end).layers);
  }
}

TEST_CASE("year loss is permutation invariant without aggregate clipping") {
  // Integer-valued degenerate losses make every partial sum exact.
  XeltSet xelts(3);
  Xoshiro256 rng(77);
  for (auto& list : xelts) {
    for (EventId e = 0; e < 40; ++e) {
      if (rng.below(2) == 0) list.push_back({e, static_cast<double>(rng.below(1000)), 0.5, 0.0, 0.0, 5000.0});
    }
  }
  const LossTable table = build_loss_table(xelts, 40);
  Layer layer = pass_through_layer({0, 1, 2});
  layer.terms.occ_retention = 100.0;
  layer.terms.occ_limit = 1500.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EventOccurrence> events(1 + rng.below(30));
    for (auto& o : events) o = {static_cast<EventId>(rng.below(40)), 0.0, rng.uniform()};
    const double expected = simulate_trial(events, layer, table);
    for (int k = 0; k < 5; ++k) {
      for (std::size_t i = events.size(); i > 1; --i) std::swap(events[i - 1], events[rng.below(i)]);
      CHECK(simulate_trial(events, layer, table) == expected);
    }
  }
}

TEST_CASE("year losses stay within the aggregate limit") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto c = fixtures::random_case(seed);
    const LossTable table = build_loss_table(c.xelts, c.catalogue);
    const RunResult r = run_portfolio(c.pf, c.yet, table, {});
    std::size_t i = 0;
    for (const auto& prog : c.pf.programs) {
      for (const auto& layer : prog.layers) {
        for (double l : r.layers[i].losses) {
          CHECK(l >= 0.0);
          CHECK(l <= layer.terms.agg_limit);
        }
        ++i;
      }
    }
  }
}

TEST_CASE("single precision tracks double precision") {
  const auto c = fixtures::tiny_case();
  const LossTable table = build_loss_table(c.xelts, c.catalogue);
  EngineConfig single;
  single.precision = Precision::kSingle;
  const auto d = run_portfolio(c.pf, c.yet, table, {}).layers[0].losses;
  const auto s = run_portfolio(c.pf, c.yet, table, single).layers[0].losses;
  for (std::size_t t = 0; t < d.size(); ++t) CHECK(std::fabs(s[t] - d[t]) <= 1e-4 * std::max(1.0, d[t]));
}

TEST_CASE("run_portfolio rejects invalid configurations and inputs") {
  const auto c = fixtures::random_case(3);
  const LossTable table = build_loss_table(c.xelts, c.catalogue);
  EngineConfig cfg;
  cfg.num_workers = 0;
  CHECK_THROWS_AS(run_portfolio(c.pf, c.yet, table, cfg), ValidationError);
  cfg = {};
  cfg.chunk_size = 0;
  CHECK_THROWS_AS(run_portfolio(c.pf, c.yet, table, cfg), ValidationError);

  Portfolio bad = c.pf;
  bad.programs[0].layers[0].xelt_ids.push_back(99);
  bad.programs[0].layers[0].xelt_terms.push_back({});
  CHECK_THROWS_AS(run_portfolio(bad, c.yet, table, {}), ValidationError);

  YearEventTable too_big(c.catalogue + 1);
  too_big.add_trial(std::vector<EventOccurrence>{{static_cast<EventId>(c.catalogue), 0.5, 0.5}});
  CHECK_THROWS_AS(run_portfolio(c.pf, too_big, table, {}), ValidationError);
}

TEST_CASE("TrialError names the failing location") {
  const TrialError e(ConvergenceError("stuck", 0.4, 1e-3), 2, 17, 5, 9);
  CHECK(e.layer_index() == 2);
  CHECK(e.trial_id() == 17);
  CHECK(e.event_position() == 5);
  CHECK(e.xelt_id() == 9);
  CHECK(e.last_iterate() == 0.4);
  CHECK(std::string(e.what()).find("trial 17") != std::string::npos);
}

TEST_CASE("portfolio rollup sums layers per trial") {
  const std::vector<YearLossTable> ylts{{0, 0, {1.0, 2.0}}, {0, 1, {10.0, 20.0}}, {1, 0, {100.0, 200.0}}};
  CHECK(portfolio_rollup(ylts) == std::vector<double>{111.0, 222.0});
  CHECK(portfolio_rollup({}).empty());
  const std::vector<YearLossTable> ragged{{0, 0, {1.0}}, {0, 1, {1.0, 2.0}}};
  CHECK_THROWS_AS(portfolio_rollup(ragged), ValidationError);
}

TEST_CASE("phase times are reported") {
  const auto c = fixtures::tiny_case();
  const LossTable table = build_loss_table(c.xelts, c.catalogue);
  const auto p = run_portfolio(c.pf, c.yet, table, {}).phases;
  CHECK(p.lookup_ms >= 0.0);
  CHECK(p.secondary_uncertainty_ms >= 0.0);
  CHECK(p.financial_terms_ms >= 0.0);
  CHECK(p.lookup_ms + p.secondary_uncertainty_ms + p.financial_terms_ms <= p.total_ms * 1.05 + 0.05);
}

// 100,000 trials x 1,000 events x 16 XELTs with degenerate records. Each
// occurrence of event e then contributes the fixed amount
//   O_e = occ(sum_j xelt_terms_j(mean_j,e)),
// and with no aggregate retention or binding limit the year loss is the sum
// of O_e over the trial, so E[year] = events_per_trial * mean_e O_e.
TEST_CASE("desk-scale mean matches the analytic expectation") {
  GenSpec s;
  s.sigma_i_fraction = {0.0, 0.0};
  s.sigma_c_fraction = {0.0, 0.0};
  const XeltSet xelts = generate_xelts(s);
  const LossTable table = build_loss_table(xelts, s.catalogue_size);
  Portfolio pf = generate_portfolio(s);
  Layer& layer = pf.programs[0].layers[0];
  REQUIRE(layer.xelt_ids.size() == 16);
  layer.terms.agg_retention = 0.0;
  layer.terms.agg_limit = kUnlimited;

  double sum_o = 0.0;
  for (EventId e = 0; e < s.catalogue_size; ++e) {
    double event_loss = 0.0;
    for (std::size_t j = 0; j < layer.xelt_ids.size(); ++j) {
      const LossSlot& slot = table.slot(layer.xelt_ids[j], e);
      if (slot.present()) event_loss += apply_xelt_terms(slot.mean_loss, layer.xelt_terms[j]);
    }
    sum_o += apply_occurrence_terms(event_loss, layer.terms);
  }
  const double expected = 1000.0 * sum_o / static_cast<double>(s.catalogue_size);

  const std::size_t trials = 100'000;
  const std::size_t batch = 20'000;
  double total = 0.0;
  for (std::size_t first = 0; first < trials; first += batch) {
    GenSpec b = s;
    b.first_trial = first;
    b.num_trials = batch;
    const auto r = run_portfolio(pf, generate_yet(b), table, {});
    for (double l : r.layers[0].losses) total += l;
  }
  const double mean = total / static_cast<double>(trials);
  INFO("empirical " << mean << " analytic " << expected);
  CHECK(std::fabs(mean - expected) <= 0.005 * expected);
}
