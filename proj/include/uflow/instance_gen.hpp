#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "uflow/core.hpp"
#include "uflow/random.hpp"

namespace uflow {

// How an extra origin node picks its q grid neighbours. Drawing with
// replacement (repeats collapsed) yields ~582 arcs on the 110-node grid and
// mean commodity counts of 182 / 1042 / 3600 at (capacity, max_demand) of
// (1, 1), (10, 3), (100, 10). Distinct links give exactly 600 arcs.
enum class OriginLinks {
  kWithReplacement,  // q draws with replacement, repeated links collapsed
  kDistinct,         // q distinct grid nodes
};

// n x n toric grid plus p = n origin nodes, each linked to q = 2n grid nodes.
struct GridSpec {
  int n = 10;
  std::uint64_t seed = 0;
  double capacity = 1e4;
  int max_demand = 1500;
  OriginLinks origin_links = OriginLinks::kWithReplacement;
};

struct RandomGraphSpec {
  int node_count = 50;
  double average_degree = 5.0;      // target mean out-degree
  double origin_probability = 0.1;
  std::uint64_t seed = 0;
  double capacity = 1e4;
  int max_demand = 1500;
};

struct DemandSet {
  std::vector<Commodity> commodities;
  std::vector<Path> witness;
};

// Torus edges become arc pairs; origin links are single arcs origin -> grid.
// Grid node (row, col) has id row * n + col; origins follow the grid nodes.
Instance generate_grid(const GridSpec& spec);

// Strongly connected random digraph grown by the unreachable-pair repair
// loop, then densified with random distinct arcs until the mean out-degree
// reaches the target.
Instance generate_random_connected(const RandomGraphSpec& spec);

// Adds commodities until no origin can reach any non-origin destination
// through arcs with residual capacity >= 1. Each commodity follows a
// randomized depth-first path and takes an integer demand uniform on
// [1, max_demand], truncated to the path's residual capacity.
DemandSet generate_demands(const Graph& graph, std::span<const NodeId> origins,
                           int max_demand, Rng& rng);

// Nodes that can reach `target` using arcs whose residual is >= min_residual.
std::vector<char> reverse_reachable(const Graph& graph, std::span<const double> residual,
                                    NodeId target, double min_residual);

// Nodes reachable from `source` using arcs whose residual is >= min_residual.
std::vector<char> forward_reachable(const Graph& graph, std::span<const double> residual,
                                    NodeId source, double min_residual);

bool is_strongly_connected(const Graph& graph);

}  // namespace uflow
