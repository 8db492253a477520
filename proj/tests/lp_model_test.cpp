#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "lp_oracle.hpp"
#include "toy_instances.hpp"
#include "uflow/decompose.hpp"
#include "uflow/instance_gen.hpp"
#include "uflow/lp_model.hpp"

namespace uflow {
namespace {

using testing_toys::parallel_arcs;

// Disaggregated arc-node LP: one flow per commodity, no grouping. Boxed
// columns so the vertex oracle applies.
lp::LpProblem disaggregated(const Instance& inst, Objective objective) {
  const Graph& g = inst.graph;
  lp::LpProblem p;
  const auto K = inst.commodities.size();
  std::vector<std::vector<int>> col(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (ArcId e = 0; e < g.arc_count(); ++e) col[k].push_back(p.add_column(0.0, 0.0, inst.commodities[k].demand));
  }
  std::vector<int> over;
  int delta = -1;
  if (objective == Objective::kCongestion) delta = p.add_column(1.0, 0.0, 1e3);
  else for (ArcId e = 0; e < g.arc_count(); ++e) over.push_back(p.add_column(1.0, 0.0, inst.total_demand()));
  for (std::size_t k = 0; k < K; ++k) {
    const Commodity& c = inst.commodities[k];
    for (NodeId v = 0; v < g.node_count(); ++v) {
      std::vector<lp::Term> t;
      for (ArcId e : g.out_arcs(v)) t.push_back({col[k][static_cast<std::size_t>(e)], 1.0});
      for (ArcId e : g.in_arcs(v)) t.push_back({col[k][static_cast<std::size_t>(e)], -1.0});
      const double b = v == c.origin ? c.demand : v == c.destination ? -c.demand : 0.0;
      p.add_row(t, lp::RowSense::kEqual, b);
    }
  }
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    std::vector<lp::Term> t;
    for (std::size_t k = 0; k < K; ++k) t.push_back({col[k][static_cast<std::size_t>(e)], 1.0});
    if (delta >= 0) {
      t.push_back({delta, -g.arc(e).capacity});
      p.add_row(t, lp::RowSense::kLessEqual, 0.0);
    } else {
      t.push_back({over[static_cast<std::size_t>(e)], -1.0});
      p.add_row(t, lp::RowSense::kLessEqual, g.arc(e).capacity);
    }
  }
  return p;
}

TEST(Relaxation, OneCommodityTwoArcsOverflowZero) {
  const Instance inst = parallel_arcs({10, 10}, {4});
  const FractionalSolution s = solve_relaxation(inst, {}, {Objective::kOverflowSum, {}});
  EXPECT_NEAR(s.objective_value, 0.0, 1e-9);
  EXPECT_NEAR(s.group_arc_flow[0][0] + s.group_arc_flow[0][1], 4.0, 1e-9);
}

TEST(Relaxation, TwoArcCongestionMatchesVertexOracle) {
  const Instance inst = parallel_arcs({10, 10}, {6, 6});
  // Path formulation x_k0 + x_k1 = 1 solved by vertex enumeration.
  lp::LpProblem path;
  const int delta = path.add_column(1.0, 0.0, 10.0);
  int x[2][2];
  for (auto& k : x) for (int& v : k) v = path.add_column(0.0, 0.0, 1.0);
  for (auto& k : x) path.add_row({{k[0], 1.0}, {k[1], 1.0}}, lp::RowSense::kEqual, 1.0);
  for (int e = 0; e < 2; ++e) {
    path.add_row({{x[0][e], 6.0}, {x[1][e], 6.0}, {delta, -10.0}}, lp::RowSense::kLessEqual, 0.0);
  }
  const auto oracle = lp::testing_oracle::enumerate_vertices(path);
  ASSERT_TRUE(oracle.has_value());
  EXPECT_NEAR(*oracle, 0.6, 1e-12);
  const FractionalSolution s = solve_relaxation(inst, {}, {Objective::kCongestion, {}});
  EXPECT_NEAR(s.objective_value, *oracle, 1e-9);
  EXPECT_NEAR(s.congestion, *oracle, 1e-9);
}

TEST(Relaxation, FixedCommodityFoldsIntoCapacityRow) {
  const Instance inst = parallel_arcs({10, 10}, {6, 6});
  FixedPaths fixed(2);
  fixed[0] = Path{1};
  const Relaxation r = build_relaxation(inst, fixed, {Objective::kOverflowSum, {}});
  EXPECT_EQ(r.fixed_load[1], 6.0);
  EXPECT_EQ(r.fixed_load[0], 0.0);
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_EQ(r.groups[0].members, (std::vector<CommodityId>{1}));
  // Rows: one conservation row (destination), then one capacity row per arc.
  ASSERT_EQ(r.problem.row_count(), 3);
  EXPECT_EQ(r.problem.rhs(2), 10.0 - 6.0);
  const Relaxation c = build_relaxation(inst, fixed, {Objective::kCongestion, {}});
  EXPECT_EQ(c.problem.rhs(2), -6.0);
}

TEST(Relaxation, MixedKeepsMinimumCongestion) {
  const Instance inst = parallel_arcs({10, 10}, {6, 6});
  const FractionalSolution m = solve_relaxation(inst, {}, {Objective::kMixed, {}});
  EXPECT_NEAR(m.first_stage_congestion, 0.6, 1e-9);
  EXPECT_LE(m.congestion, 0.6 + 1e-9);
  // Loads 6 and 6 on capacities 10: nothing overflows.
  EXPECT_NEAR(m.objective_value, 0.0, 1e-9);
  EXPECT_EQ(m.lp_solves, 2);
}

TEST(Relaxation, MixedNoWorseThanCongestionOnOverflow) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Instance inst = generate_grid(GridSpec{.n = 4, .seed = seed, .capacity = 10, .max_demand = 3});
    FixedPaths fixed(inst.commodities.size());
    for (std::size_t k = 0; k < fixed.size(); k += 3) fixed[k] = (*inst.witness)[k];
    const FractionalSolution c = solve_relaxation(inst, fixed, {Objective::kCongestion, {}});
    const FractionalSolution m = solve_relaxation(inst, fixed, {Objective::kMixed, {}});
    double c_over = 0.0;
    for (double o : c.overflow) c_over += o;
    EXPECT_LE(m.congestion, c.congestion + 1e-9);
    EXPECT_LE(m.objective_value, c_over + 1e-6);
  }
}

TEST(Relaxation, GeneratedInstanceOverflowZero) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Instance inst = generate_grid(GridSpec{.n = 5, .seed = seed, .capacity = 100, .max_demand = 10});
    const FractionalSolution s = solve_relaxation(inst, {}, {Objective::kOverflowSum, {}});
    EXPECT_NEAR(s.objective_value, 0.0, 1e-6);
    EXPECT_LE(s.congestion, 1.0 + 1e-9);
  }
}

TEST(Relaxation, EmptyFreeSetGivesFixedOverflow) {
  const Instance inst = parallel_arcs({10, 10}, {6, 6, 3});
  const FixedPaths fixed{Path{0}, Path{0}, Path{1}};
  const FractionalSolution s = solve_relaxation(inst, fixed, {Objective::kOverflowSum, {}});
  const Metrics m = evaluate(inst, PathAssignment{{{0}, {0}, {1}}});
  EXPECT_NEAR(s.objective_value, m.overflow_sum, 1e-12);
  EXPECT_NEAR(s.objective_value, 2.0, 1e-12);
}

TEST(Relaxation, FixingNeverDecreasesOverflow) {
  const Instance inst = generate_grid(GridSpec{.n = 4, .seed = 8, .capacity = 10, .max_demand = 3});
  FixedPaths fixed(inst.commodities.size());
  double previous = solve_relaxation(inst, fixed, {Objective::kOverflowSum, {}}).objective_value;
  // Fix every fifth commodity onto the last support path of the current
  // decomposition.
  for (std::size_t k = 0; k < fixed.size(); k += 5) {
    const FractionalSolution s = solve_relaxation(inst, fixed, {Objective::kOverflowSum, {}});
    std::vector<CommodityId> order(inst.commodities.size());
    std::iota(order.begin(), order.end(), 0);
    const PathDistribution d = decompose(inst, s, order);
    fixed[k] = d.paths[k].back().path;
    const double now = solve_relaxation(inst, fixed, {Objective::kOverflowSum, {}}).objective_value;
    EXPECT_GE(now, previous - 1e-6);
    previous = now;
  }
}

TEST(Relaxation, AggregationMatchesDisaggregated) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Instance inst = generate_random_connected(
        RandomGraphSpec{.node_count = 8, .average_degree = 2.5, .origin_probability = 0.3, .seed = seed, .capacity = 3, .max_demand = 2});
    // Tighten capacities so the optimum is not trivially zero.
    std::vector<Arc> arcs(inst.graph.arcs().begin(), inst.graph.arcs().end());
    for (Arc& a : arcs) a.capacity = 1.5;
    Instance tight{Graph(inst.graph.node_count(), arcs), inst.commodities, std::nullopt};
    for (Objective obj : {Objective::kOverflowSum, Objective::kCongestion}) {
      const lp::LpSolution ref = lp::solve(disaggregated(tight, obj));
      ASSERT_EQ(ref.status, lp::LpStatus::kOptimal);
      const FractionalSolution s = solve_relaxation(tight, {}, {obj, {}});
      EXPECT_NEAR(s.objective_value, ref.objective, 1e-6) << "seed " << seed << " " << to_string(obj);
    }
  }
}

TEST(Relaxation, CsrrRowsUnitBetaLeaveFirstOptimum) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Instance inst = generate_grid(GridSpec{.n = 4, .seed = seed, .capacity = 10, .max_demand = 3});
    const FractionalSolution plain = solve_relaxation(inst, {}, {Objective::kCongestion, {}});
    CsrrRows rows{plain.congestion, 1.0, std::vector<double>(static_cast<std::size_t>(inst.graph.arc_count()), 0.0)};
    const FractionalSolution with = solve_relaxation(inst, {}, {Objective::kCongestion, rows});
    EXPECT_NEAR(with.objective_value, plain.objective_value, 1e-6);
    for (double slack : with.csrr_slack) EXPECT_GE(slack, -1e-6);
  }
}

TEST(Relaxation, CsrrNegativeRightSideNamesArc) {
  const Instance inst = parallel_arcs({10, 10}, {6, 6});
  CsrrRows rows{0.6, 1.0, {0.0, 7.0}};
  try {
    build_relaxation(inst, {}, {Objective::kCongestion, rows});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("arc 1"), std::string::npos) << e.what();
  }
}

TEST(Relaxation, CsrrRowsBindWhenViolated) {
  // Second arc is the only route for the free commodity but its CSRR budget
  // is smaller than the demand: the restricted LP is infeasible.
  Instance inst;
  inst.graph = Graph(2, {Arc{0, 1, 10.0}});
  inst.commodities = {Commodity{0, 1, 6.0}, Commodity{0, 1, 6.0}};
  FixedPaths fixed{Path{0}, std::nullopt};
  CsrrRows rows{1.2, 1.0, {9.0}};
  EXPECT_THROW(solve_relaxation(inst, fixed, {Objective::kCongestion, rows}), Error);
  rows.footprint_load = {6.0};
  const FractionalSolution s = solve_relaxation(inst, fixed, {Objective::kCongestion, rows});
  EXPECT_FALSE(s.csrr_rows_added);
  EXPECT_NEAR(s.csrr_slack[0], 0.0, 1e-9);
}

TEST(Relaxation, WarmStartReproducesColdOptimum) {
  const Instance inst = generate_grid(GridSpec{.n = 5, .seed = 2, .capacity = 10, .max_demand = 3});
  WarmStart warm;
  FixedPaths fixed(inst.commodities.size());
  for (std::size_t k = 0; k < fixed.size(); k += 4) {
    fixed[k] = (*inst.witness)[k];
    const double a = solve_relaxation(inst, fixed, {Objective::kOverflowSum, {}}, lp::default_backend(), &warm).objective_value;
    const double b = solve_relaxation(inst, fixed, {Objective::kOverflowSum, {}}).objective_value;
    EXPECT_NEAR(a, b, 1e-6);
  }
}

TEST(Granularity, Formula) {
  EXPECT_DOUBLE_EQ(granularity(parallel_arcs({1}, {1}), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(granularity(parallel_arcs({1e4, 2e4}, {1500, 20}), 1.0), 0.15);
  EXPECT_DOUBLE_EQ(granularity(parallel_arcs({10}, {3}), 1.0), 0.3);
  EXPECT_THROW(granularity(parallel_arcs({10}, {3}), 0.0), Error);
}

TEST(Objective, ParseRoundTrip) {
  for (Objective o : {Objective::kOverflowSum, Objective::kCongestion, Objective::kMixed}) {
    EXPECT_EQ(parse_objective(to_string(o)), o);
  }
  EXPECT_THROW(parse_objective("cost"), Error);
}

}  // namespace
}  // namespace uflow
