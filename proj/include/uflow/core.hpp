#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uflow {

using NodeId = std::int32_t;
using ArcId = std::int32_t;
using CommodityId = std::int32_t;

// A path is the ordered list of arc indices it traverses.
using Path = std::vector<ArcId>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Arc {
  NodeId tail = 0;
  NodeId head = 0;
  double capacity = 0.0;
};

// Directed multigraph with positional arc identity. The arc order given at
// construction is the canonical arc index used by files, LP columns and
// reports. Immutable once built.
class Graph {
 public:
  Graph() = default;
  // Throws Error when an arc endpoint is outside [0, node_count).
  Graph(NodeId node_count, std::vector<Arc> arcs);

  NodeId node_count() const { return node_count_; }
  ArcId arc_count() const { return static_cast<ArcId>(arcs_.size()); }
  const Arc& arc(ArcId a) const { return arcs_[static_cast<std::size_t>(a)]; }
  std::span<const Arc> arcs() const { return arcs_; }

  // Outgoing / incoming arcs of v in increasing arc index.
  std::span<const ArcId> out_arcs(NodeId v) const;
  std::span<const ArcId> in_arcs(NodeId v) const;

  double min_capacity() const;

 private:
  NodeId node_count_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::int32_t> out_start_, in_start_;
  std::vector<ArcId> out_list_, in_list_;
};

struct Commodity {
  NodeId origin = 0;
  NodeId destination = 0;
  double demand = 0.0;
};

struct Instance {
  Graph graph;
  std::vector<Commodity> commodities;
  // Generating paths, one per commodity, certifying a zero-overflow routing.
  std::optional<std::vector<Path>> witness;

  CommodityId commodity_count() const {
    return static_cast<CommodityId>(commodities.size());
  }
  double total_demand() const;
  double max_demand() const;
};

// One path per commodity: the unsplittable routing.
struct PathAssignment {
  std::vector<Path> paths;
};

struct Metrics {
  double overflow_sum = 0.0;
  double congestion = 0.0;
  std::vector<double> arc_load;
};

// Returns a description of what is wrong with `path` as a route for
// `commodity`, or nullopt when it is a simple origin-destination path.
std::optional<std::string> path_error(const Graph& graph,
                                      const Commodity& commodity,
                                      std::span<const ArcId> path);

// Per-arc loads, overflow sum and congestion of an unsplittable routing.
// Throws Error naming the first commodity whose path is invalid.
Metrics evaluate(const Instance& instance, const PathAssignment& assignment);

// Overflow sum and congestion of a given per-arc load vector.
Metrics metrics_from_loads(const Graph& graph, std::vector<double> arc_load);

// Human-readable list of violated instance invariants; empty when valid.
std::vector<std::string> validate_instance(const Instance& instance);

}  // namespace uflow
