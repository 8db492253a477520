#include "uflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uflow {

namespace {

// Builds CSR adjacency keyed by `key(arc)`, arcs kept in index order.
void build_adjacency(const std::vector<Arc>& arcs, NodeId node_count,
                     bool by_tail, std::vector<std::int32_t>& start,
                     std::vector<ArcId>& list) {
  start.assign(static_cast<std::size_t>(node_count) + 1, 0);
  for (const Arc& a : arcs) ++start[static_cast<std::size_t>(by_tail ? a.tail : a.head) + 1];
  for (std::size_t v = 0; v < static_cast<std::size_t>(node_count); ++v) start[v + 1] += start[v];
  list.assign(arcs.size(), 0);
  std::vector<std::int32_t> fill(start.begin(), start.end() - 1);
  for (ArcId e = 0; e < static_cast<ArcId>(arcs.size()); ++e) {
    const Arc& a = arcs[static_cast<std::size_t>(e)];
    list[static_cast<std::size_t>(fill[static_cast<std::size_t>(by_tail ? a.tail : a.head)]++)] = e;
  }
}

}  // namespace

Graph::Graph(NodeId node_count, std::vector<Arc> arcs)
    : node_count_(node_count), arcs_(std::move(arcs)) {
  if (node_count < 0) throw Error("graph: negative node count");
  for (std::size_t e = 0; e < arcs_.size(); ++e) {
    const Arc& a = arcs_[e];
    if (a.tail < 0 || a.tail >= node_count || a.head < 0 || a.head >= node_count) {
      std::ostringstream msg;
      msg << "graph: arc " << e << " (" << a.tail << " -> " << a.head
          << ") has an endpoint outside [0, " << node_count << ")";
      throw Error(msg.str());
    }
  }
  build_adjacency(arcs_, node_count_, true, out_start_, out_list_);
  build_adjacency(arcs_, node_count_, false, in_start_, in_list_);
}

std::span<const ArcId> Graph::out_arcs(NodeId v) const {
  const auto b = static_cast<std::size_t>(out_start_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(out_start_[static_cast<std::size_t>(v) + 1]);
  return std::span<const ArcId>(out_list_).subspan(b, e - b);
}

std::span<const ArcId> Graph::in_arcs(NodeId v) const {
  const auto b = static_cast<std::size_t>(in_start_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(in_start_[static_cast<std::size_t>(v) + 1]);
  return std::span<const ArcId>(in_list_).subspan(b, e - b);
}

double Graph::min_capacity() const {
  if (arcs_.empty()) throw Error("graph: no arcs");
  double c = arcs_.front().capacity;
  for (const Arc& a : arcs_) c = std::min(c, a.capacity);
  return c;
}

double Instance::total_demand() const {
  double total = 0.0;
  for (const Commodity& k : commodities) total += k.demand;
  return total;
}

double Instance::max_demand() const {
  double d = 0.0;
  for (const Commodity& k : commodities) d = std::max(d, k.demand);
  return d;
}

std::optional<std::string> path_error(const Graph& graph, const Commodity& commodity,
                                      std::span<const ArcId> path) {
  if (path.empty()) return "empty path";
  std::vector<char> seen(static_cast<std::size_t>(graph.node_count()), 0);
  NodeId at = commodity.origin;
  if (at < 0 || at >= graph.node_count()) return "origin outside the graph";
  seen[static_cast<std::size_t>(at)] = 1;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const ArcId e = path[i];
    if (e < 0 || e >= graph.arc_count()) {
      return "arc index " + std::to_string(e) + " out of range";
    }
    const Arc& a = graph.arc(e);
    if (a.tail != at) {
      return "arc " + std::to_string(e) + " does not start at node " + std::to_string(at);
    }
    at = a.head;
    if (seen[static_cast<std::size_t>(at)]) {
      return "node " + std::to_string(at) + " visited twice";
    }
    seen[static_cast<std::size_t>(at)] = 1;
  }
  if (at != commodity.destination) {
    return "path ends at node " + std::to_string(at) + " instead of " +
           std::to_string(commodity.destination);
  }
  return std::nullopt;
}

Metrics metrics_from_loads(const Graph& graph, std::vector<double> arc_load) {
  Metrics m;
  for (ArcId e = 0; e < graph.arc_count(); ++e) {
    const double load = arc_load[static_cast<std::size_t>(e)];
    const double cap = graph.arc(e).capacity;
    m.overflow_sum += std::max(0.0, load - cap);
    m.congestion = std::max(m.congestion, load / cap);
  }
  m.arc_load = std::move(arc_load);
  return m;
}

Metrics evaluate(const Instance& instance, const PathAssignment& assignment) {
  const Graph& g = instance.graph;
  if (assignment.paths.size() != instance.commodities.size()) {
    throw Error("evaluate: assignment has " + std::to_string(assignment.paths.size()) +
                " paths for " + std::to_string(instance.commodities.size()) + " commodities");
  }
  std::vector<double> load(static_cast<std::size_t>(g.arc_count()), 0.0);
  for (std::size_t k = 0; k < instance.commodities.size(); ++k) {
    const Commodity& c = instance.commodities[k];
    if (auto err = path_error(g, c, assignment.paths[k])) {
      throw Error("evaluate: commodity " + std::to_string(k) + ": " + *err);
    }
    for (ArcId e : assignment.paths[k]) load[static_cast<std::size_t>(e)] += c.demand;
  }
  return metrics_from_loads(g, std::move(load));
}

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> out;
  const Graph& g = instance.graph;
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    const double c = g.arc(e).capacity;
    if (!(c > 0.0) || !std::isfinite(c)) {
      out.push_back("arc " + std::to_string(e) + ": capacity " + std::to_string(c) +
                    " is not positive");
    }
  }
  for (std::size_t k = 0; k < instance.commodities.size(); ++k) {
    const Commodity& c = instance.commodities[k];
    const std::string tag = "commodity " + std::to_string(k) + ": ";
    if (c.origin < 0 || c.origin >= g.node_count()) out.push_back(tag + "origin out of range");
    if (c.destination < 0 || c.destination >= g.node_count()) {
      out.push_back(tag + "destination out of range");
    }
    if (c.origin == c.destination) out.push_back(tag + "origin equals destination");
    if (!(c.demand > 0.0) || !std::isfinite(c.demand)) {
      out.push_back(tag + "demand " + std::to_string(c.demand) + " is not positive");
    }
  }
  if (instance.witness) {
    const auto& w = *instance.witness;
    if (w.size() != instance.commodities.size()) {
      out.push_back("witness: " + std::to_string(w.size()) + " paths for " +
                    std::to_string(instance.commodities.size()) + " commodities");
      return out;
    }
    std::vector<double> load(static_cast<std::size_t>(g.arc_count()), 0.0);
    bool paths_ok = true;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (auto err = path_error(g, instance.commodities[k], w[k])) {
        out.push_back("witness path " + std::to_string(k) + ": " + *err);
        paths_ok = false;
        continue;
      }
      for (ArcId e : w[k]) load[static_cast<std::size_t>(e)] += instance.commodities[k].demand;
    }
    if (paths_ok) {
      for (ArcId e = 0; e < g.arc_count(); ++e) {
        const double excess = load[static_cast<std::size_t>(e)] - g.arc(e).capacity;
        if (excess > 1e-9) {
          out.push_back("witness: arc " + std::to_string(e) + " exceeds capacity by " +
                        std::to_string(excess));
        }
      }
    }
  }
  return out;
}

}  // namespace uflow
