#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "toy_instances.hpp"
#include "uflow/instance_gen.hpp"
#include "uflow/rounding.hpp"

namespace uflow {
namespace {

using testing_toys::parallel_arcs;

TEST(RoundOnce, SinglePathAlways) {
  const std::vector<WeightedPath> dist{{{3, 4}, 1.0}};
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(round_once(dist, rng), (Path{3, 4}));
}

TEST(RoundOnce, FrequencyMatchesWeight) {
  const std::vector<WeightedPath> dist{{{0}, 0.75}, {{1}, 0.25}};
  Rng rng(2);
  const int draws = 100000;
  int first = 0;
  for (int i = 0; i < draws; ++i) first += round_once(dist, rng) == Path{0};
  EXPECT_NEAR(static_cast<double>(first) / draws, 0.75, 0.01);
}

TEST(RoundOnce, ZeroWeightNeverChosen) {
  const std::vector<WeightedPath> dist{{{0}, 0.0}, {{1}, 0.5}, {{2}, 0.0}, {{3}, 0.5}, {{4}, 0.0}};
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    const Path& p = round_once(dist, rng);
    EXPECT_TRUE(p == Path{1} || p == Path{3});
  }
}

TEST(RoundOnce, EmptySupportRejected) {
  Rng rng(4);
  EXPECT_THROW(round_once(std::span<const WeightedPath>{}, rng), Error);
}

TEST(Variant, ParseRoundTrip) {
  for (Variant v : {Variant::kRr, Variant::kRrSorted, Variant::kSrr, Variant::kSrrUnsorted, Variant::kCsrr}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_EQ(parse_variant("srr_unsorted"), Variant::kSrrUnsorted);
  EXPECT_THROW(parse_variant("aco"), Error);
}

TEST(Order, DecreasingDemandTiesByIndex) {
  const Instance inst = parallel_arcs({10}, {2, 5, 2, 7});
  Rng rng(0);
  EXPECT_EQ(commodity_order(inst, OrderRule::kDecreasingDemand, rng), (std::vector<CommodityId>{3, 1, 0, 2}));
  EXPECT_EQ(commodity_order(inst, OrderRule::kInput, rng), (std::vector<CommodityId>{0, 1, 2, 3}));
  auto shuffled = commodity_order(inst, OrderRule::kShuffled, rng);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, (std::vector<CommodityId>{0, 1, 2, 3}));
}

TEST(Rr, IntegralRelaxationIsKept) {
  Instance inst;
  inst.graph = Graph(3, {Arc{0, 1, 10}, Arc{1, 2, 10}});
  inst.commodities = {Commodity{0, 2, 4}, Commodity{0, 1, 3}};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RoundingResult r = run_rr(inst, RoundingConfig{.variant = Variant::kRr, .seed = seed});
    EXPECT_EQ(r.assignment.paths[0], (Path{0, 1}));
    EXPECT_EQ(r.assignment.paths[1], (Path{0}));
    EXPECT_EQ(r.metrics.overflow_sum, 0.0);
    EXPECT_EQ(r.lp_solves, 1);
  }
}

// Expected RR overflow on a two-arc toy whose relaxation must split: enumerate
// every joint outcome of the per-commodity distributions with its
// probability, then compare with the empirical mean over many seeds.
TEST(Rr, TwoArcToyMatchesOutcomeEnumeration) {
  const Instance inst = parallel_arcs({10, 10}, {6, 6, 6});
  const FractionalSolution lp = solve_relaxation(inst, {}, {Objective::kCongestion, {}});
  const std::vector<CommodityId> order{0, 1, 2};
  const PathDistribution d = decompose(inst, lp, order);
  double expected = 0.0;
  std::vector<Path> pick(3);
  auto enumerate = [&](auto&& self, std::size_t k, double prob) -> void {
    if (k == pick.size()) {
      expected += prob * evaluate(inst, PathAssignment{pick}).overflow_sum;
      return;
    }
    for (const WeightedPath& w : d.paths[k]) {
      pick[k] = w.path;
      self(self, k + 1, prob * w.weight);
    }
  };
  enumerate(enumerate, 0, 1.0);
  EXPECT_GT(expected, 0.0);
  const int runs = 4000;
  double sum = 0.0, sq = 0.0;
  for (int s = 0; s < runs; ++s) {
    RoundingConfig c{.variant = Variant::kRr, .objective = Objective::kCongestion};
    c.seed = static_cast<std::uint64_t>(s);
    const double o = run_rr(inst, c).metrics.overflow_sum;
    sum += o;
    sq += o * o;
  }
  const double mean = sum / runs;
  const double sd = std::sqrt(std::max(0.0, sq / runs - mean * mean));
  EXPECT_NEAR(mean, expected, 4.0 * sd / std::sqrt(runs) + 1e-12);
}

TEST(Srr, LargeThetaEqualsSortedRr) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 1, .capacity = 10, .max_demand = 3});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RoundingResult rr = run_rr(inst, RoundingConfig{.variant = Variant::kRrSorted, .seed = seed});
    const RoundingResult srr = run_srr(inst, RoundingConfig{.variant = Variant::kSrr, .theta = inst.commodity_count(), .seed = seed});
    EXPECT_EQ(rr.assignment.paths, srr.assignment.paths);
    EXPECT_EQ(srr.lp_solves, 1);
  }
}

TEST(Srr, InputOrderReproducesRr) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 2, .capacity = 10, .max_demand = 3});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RoundingResult rr = run_rr(inst, RoundingConfig{.variant = Variant::kRr, .seed = seed});
    const RoundingResult srr = run_srr(inst, RoundingConfig{.variant = Variant::kSrr, .theta = inst.commodity_count(), .order = OrderRule::kInput, .seed = seed});
    EXPECT_EQ(rr.assignment.paths, srr.assignment.paths);
  }
}

TEST(Srr, OutputValidAndSeedDeterministic) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 3, .capacity = 10, .max_demand = 3});
  for (Variant v : {Variant::kRr, Variant::kRrSorted, Variant::kSrr, Variant::kSrrUnsorted, Variant::kCsrr}) {
    const RoundingConfig c{.variant = v, .seed = 11};
    const RoundingResult a = run_rounding(inst, c);
    const RoundingResult b = run_rounding(inst, c);
    EXPECT_EQ(a.assignment.paths, b.assignment.paths) << to_string(v);
    ASSERT_EQ(a.assignment.paths.size(), inst.commodities.size());
    for (std::size_t k = 0; k < inst.commodities.size(); ++k) {
      EXPECT_FALSE(path_error(inst.graph, inst.commodities[k], a.assignment.paths[k]).has_value());
    }
    EXPECT_EQ(evaluate(inst, a.assignment).overflow_sum, a.metrics.overflow_sum);
  }
}

TEST(Srr, ThetaCountsOnlySplitCommodities) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 4, .capacity = 10, .max_demand = 3});
  const RoundingResult r = run_srr(inst, RoundingConfig{.variant = Variant::kSrr, .theta = 1, .seed = 5, .record_trace = true});
  // With theta = 1 every split fixing triggers a re-solve unless it is the last.
  EXPECT_GE(r.lp_solves, r.split_fixed);
  EXPECT_LE(r.lp_solves, r.split_fixed + 1);
  ASSERT_EQ(static_cast<int>(r.trace.size()), r.lp_solves);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GT(r.trace[i].fixed_count, r.trace[i - 1].fixed_count);
}

// Two parallel arcs, total demand equal to total capacity and no exact fit:
// after each actualization the remaining overflow of the relaxation is at most
// the demand of the commodity left split, which shrinks along the sorted order.
TEST(Srr, ParallelArcToyOverflowBoundedBySplitDemand) {
  Rng gen(5);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> demands;
    double total = 0.0;
    while (total < 14) {
      demands.push_back(static_cast<double>(gen.uniform_int(1, 5)));
      total += demands.back();
    }
    const Instance inst = parallel_arcs({total / 2, total / 2}, demands);
    const RoundingResult r = run_srr(inst, RoundingConfig{.variant = Variant::kSrr, .theta = 1, .seed = static_cast<std::uint64_t>(trial), .record_trace = true});
    double last_split_demand = 0.0;
    for (const SolveRecord& rec : r.trace) {
      if (!rec.split.empty()) last_split_demand = inst.commodities[static_cast<std::size_t>(rec.split.front())].demand;
    }
    EXPECT_LE(r.metrics.overflow_sum, last_split_demand + 1e-9) << "trial " << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

TEST(Srr, BeatsRrOnSmallGrids) {
  double rr_sum = 0.0, srr_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = generate_grid(GridSpec{.n = 5, .seed = seed, .capacity = 100, .max_demand = 10});
    rr_sum += run_rr(inst, RoundingConfig{.variant = Variant::kRr, .seed = seed}).metrics.overflow_sum;
    srr_sum += run_srr(inst, RoundingConfig{.variant = Variant::kSrr, .seed = seed}).metrics.overflow_sum;
  }
  EXPECT_GT(rr_sum, srr_sum);
}

TEST(Csrr, LargeBetaMatchesSrrCongestion) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 6, .capacity = 10, .max_demand = 3});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RoundingResult c = run_csrr(inst, RoundingConfig{.variant = Variant::kCsrr, .beta = 10.0, .seed = seed, .record_trace = true});
    const RoundingResult s = run_srr(inst, RoundingConfig{.variant = Variant::kSrr, .objective = Objective::kCongestion, .seed = seed});
    EXPECT_EQ(c.assignment.paths, s.assignment.paths);
    for (const SolveRecord& rec : c.trace) {
      EXPECT_FALSE(rec.csrr_rows_added);
      for (double slack : rec.csrr_slack) EXPECT_GE(slack, -1e-6);
    }
  }
}

// Uniform-congestion toy: the first relaxation fills all three arcs and both
// 12s must split. With beta = 1 the second relaxation cannot move the free
// flow at all.
TEST(Csrr, UnitBetaFreezesFreeFlows) {
  const Instance inst = parallel_arcs({10, 10, 10}, {12, 12, 6});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RoundingResult r = run_csrr(inst, RoundingConfig{.variant = Variant::kCsrr, .theta = 1, .beta = 1.0, .seed = seed, .record_trace = true});
    EXPECT_NEAR(r.delta_star, 1.0, 1e-9);
    ASSERT_GE(r.trace.size(), 2u);
    const SolveRecord& first = r.trace[0];
    const SolveRecord& second = r.trace[1];
    // Free flow of the commodities still free at the second solve, as carried
    // by the first relaxation: its total minus the fixed commodities' share.
    const FractionalSolution lp = solve_relaxation(inst, {}, {Objective::kCongestion, {}});
    const PathDistribution d = decompose(inst, lp, r.order);
    std::vector<double> expected = first.free_load;
    for (int i = 0; i < second.fixed_count; ++i) {
      const auto k = static_cast<std::size_t>(r.order[static_cast<std::size_t>(i)]);
      const auto load = commodity_arc_load(inst.graph, d.paths[k], inst.commodities[k].demand);
      for (std::size_t e = 0; e < expected.size(); ++e) expected[e] -= load[e];
    }
    for (std::size_t e = 0; e < expected.size(); ++e) EXPECT_NEAR(second.free_load[e], expected[e], 1e-6);
    for (double slack : second.csrr_slack) EXPECT_GE(slack, -1e-6);
  }
}

TEST(Csrr, RowsRespectedAtEveryResolve) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 7, .capacity = 10, .max_demand = 3});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RoundingResult r = run_csrr(inst, RoundingConfig{.variant = Variant::kCsrr, .theta = 2, .beta = 1.0, .seed = seed, .record_trace = true});
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      for (double slack : r.trace[i].csrr_slack) EXPECT_GE(slack, -1e-6);
    }
  }
}

}  // namespace
}  // namespace uflow
