#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uflow/core.hpp"
#include "uflow/lp_model.hpp"

namespace uflow {

struct WeightedPath {
  Path path;
  double weight = 0.0;  // in (0, 1]
};

// Support paths per commodity; empty for fixed commodities.
struct PathDistribution {
  std::vector<std::vector<WeightedPath>> paths;
};

// Removes every directed cycle from `flow` (per-arc amounts) by subtracting
// the bottleneck around it. Flow on each arc only decreases. Entries at or
// below `eps` count as zero.
void cancel_cycles(const Graph& graph, std::span<double> flow, double eps = 1e-12);

struct PeeledPath {
  Path path;
  NodeId end = 0;
  double amount = 0.0;
};

// Peels one `origin` -> `target` path with the fewest arcs among arcs whose
// residual exceeds `eps`, carrying min(bottleneck, limit); the amount is
// subtracted from `residual`. Breadth-first search scanning out-arcs in index
// order breaks ties. Returns nullopt when `target` is unreachable or equals
// `origin`.
std::optional<PeeledPath> peel_shortest_path(const Graph& graph, std::span<double> residual, NodeId origin,
                                             NodeId target, double limit, double eps = 1e-12);

// Disaggregates group flows into per-commodity paths. Free members are served
// in the order they appear in `order`: each peels origin-destination paths
// from what is left of its group's flow until its demand is met, so members
// served early see more of the flow and split less.
// Throws Error naming the group and node when conservation is off by more
// than 1e-6, or when more than 1e-6 of flow is left after peeling.
PathDistribution decompose(const Instance& instance, const FractionalSolution& solution,
                           std::span<const CommodityId> order);

// Per-arc flow of commodity k under its distribution, scaled by demand.
std::vector<double> commodity_arc_load(const Graph& graph,
                                       std::span<const WeightedPath> paths, double demand);

}  // namespace uflow
