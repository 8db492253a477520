#include <queue>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "uflow/core.hpp"
#include "uflow/instance_gen.hpp"
#include "uflow/instance_io.hpp"

namespace uflow {
namespace {

// Plain BFS over an adjacency matrix, independent of Graph's CSR lists.
std::vector<char> bfs(const Instance& inst, NodeId s, bool reverse) {
  const int n = inst.graph.node_count();
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (const Arc& a : inst.graph.arcs()) {
    if (reverse) adj[static_cast<std::size_t>(a.head)][static_cast<std::size_t>(a.tail)] = 1;
    else adj[static_cast<std::size_t>(a.tail)][static_cast<std::size_t>(a.head)] = 1;
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(s);
  seen[static_cast<std::size_t>(s)] = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w = 0; w < n; ++w) {
      if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
    }
  }
  return seen;
}

void expect_witness_exact(const Instance& inst) {
  ASSERT_TRUE(inst.witness.has_value());
  const Metrics m = evaluate(inst, PathAssignment{*inst.witness});
  EXPECT_EQ(m.overflow_sum, 0.0);
  EXPECT_LE(m.congestion, 1.0);
  EXPECT_TRUE(validate_instance(inst).empty());
}

// No origin can still reach a non-origin through arcs with residual >= 1.
void expect_saturated(const Instance& inst, int origin_begin) {
  std::vector<double> residual(static_cast<std::size_t>(inst.graph.arc_count()));
  for (ArcId e = 0; e < inst.graph.arc_count(); ++e) residual[static_cast<std::size_t>(e)] = inst.graph.arc(e).capacity;
  for (std::size_t k = 0; k < inst.commodities.size(); ++k) {
    for (ArcId e : (*inst.witness)[k]) residual[static_cast<std::size_t>(e)] -= inst.commodities[k].demand;
  }
  for (NodeId o = origin_begin; o < inst.graph.node_count(); ++o) {
    const auto reach = forward_reachable(inst.graph, residual, o, 1.0);
    for (NodeId v = 0; v < origin_begin; ++v) EXPECT_FALSE(reach[static_cast<std::size_t>(v)]) << o << "->" << v;
  }
}

TEST(GenerateGrid, TenByTenShape) {
  const Instance inst = generate_grid(GridSpec{.n = 10, .seed = 3});
  EXPECT_EQ(inst.graph.node_count(), 110);
  EXPECT_NEAR(inst.graph.arc_count(), 580, 29);
  expect_witness_exact(inst);
}

TEST(GenerateGrid, TwoByTwoArcCountFromEnumeration) {
  // Count distinct undirected torus neighbour pairs of the 2x2 grid by brute force.
  std::set<std::pair<int, int>> edges;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      for (auto [dr, dc] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{0, -1}, std::pair{-1, 0}}) {
        const int u = r * 2 + c;
        const int v = ((r + dr + 2) % 2) * 2 + (c + dc + 2) % 2;
        edges.emplace(std::min(u, v), std::max(u, v));
      }
    }
  }
  ASSERT_EQ(edges.size(), 4u);
  const int p = 2, q = 4;
  const Instance inst = generate_grid(GridSpec{.n = 2, .seed = 11, .origin_links = OriginLinks::kDistinct});
  EXPECT_EQ(inst.graph.node_count(), 6);
  EXPECT_EQ(inst.graph.arc_count(), static_cast<int>(2 * edges.size()) + p * q);
  expect_witness_exact(inst);
}

TEST(GenerateGrid, SaturatedAndWitnessFeasible) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = generate_grid(GridSpec{.n = 4, .seed = seed, .capacity = 10, .max_demand = 3});
    expect_witness_exact(inst);
    expect_saturated(inst, 16);
    for (const Commodity& c : inst.commodities) {
      EXPECT_GE(c.origin, 16);
      EXPECT_LT(c.destination, 16);
      EXPECT_EQ(c.demand, std::floor(c.demand));
    }
  }
}

TEST(GenerateGrid, DeterministicBytes) {
  const GridSpec spec{.n = 5, .seed = 42, .capacity = 100, .max_demand = 10};
  std::stringstream a, b;
  write_instance(a, generate_grid(spec));
  write_instance(b, generate_grid(spec));
  EXPECT_EQ(a.str(), b.str());
}

TEST(GenerateGrid, DistinctLinksGiveSixHundredArcs) {
  const Instance inst = generate_grid(GridSpec{.n = 10, .seed = 1, .origin_links = OriginLinks::kDistinct});
  EXPECT_EQ(inst.graph.arc_count(), 600);
}

TEST(GenerateRandom, RejectsSingleNode) {
  EXPECT_THROW(generate_random_connected(RandomGraphSpec{.node_count = 1}), Error);
}

TEST(GenerateRandom, StronglyConnectedByTwoSearches) {
  const Instance inst = generate_random_connected(RandomGraphSpec{.node_count = 20, .seed = 9, .capacity = 10, .max_demand = 3});
  for (bool reverse : {false, true}) {
    const auto seen = bfs(inst, 0, reverse);
    for (char s : seen) EXPECT_TRUE(s);
  }
  expect_witness_exact(inst);
}

TEST(GenerateRandom, ArcCountFromAverageDegree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = generate_random_connected(RandomGraphSpec{.node_count = 50, .seed = seed, .capacity = 10, .max_demand = 3});
    EXPECT_NEAR(inst.graph.arc_count(), 250, 1);
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const Arc& a : inst.graph.arcs()) {
      EXPECT_NE(a.tail, a.head);
      EXPECT_TRUE(pairs.emplace(a.tail, a.head).second);
    }
  }
}

TEST(GenerateDemands, SingleArcSaturates) {
  const Graph g(2, {Arc{0, 1, 10.0}});
  const std::vector<NodeId> origins{0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const DemandSet d = generate_demands(g, origins, 10, rng);
    double total = 0.0;
    for (const Commodity& c : d.commodities) total += c.demand;
    EXPECT_EQ(total, 10.0);
  }
}

TEST(GenerateDemands, NoReachableDestinationGivesEmpty) {
  const Graph g(2, {Arc{1, 0, 10.0}});
  const std::vector<NodeId> origins{0};
  Rng rng(1);
  EXPECT_TRUE(generate_demands(g, origins, 5, rng).commodities.empty());
}

}  // namespace
}  // namespace uflow
