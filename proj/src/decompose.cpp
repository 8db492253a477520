#include "uflow/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace uflow {

namespace {

constexpr double kPeelEps = 1e-10;
constexpr double kConservationTol = 1e-6;
// Path fragments lighter than this fraction of the demand are dropped.
constexpr double kFragment = 1e-9;

// Finds one directed cycle among arcs with flow > eps; empty if none.
Path find_cycle(const Graph& g, std::span<const double> flow, double eps) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<char> color(n, 0);  // 0 new, 1 on stack, 2 done
  struct Frame {
    NodeId node;
    ArcId via;
    std::size_t cursor;
  };
  std::vector<Frame> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (color[static_cast<std::size_t>(s)] != 0) continue;
    stack.push_back({s, -1, 0});
    color[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto out = g.out_arcs(top.node);
      if (top.cursor == out.size()) {
        color[static_cast<std::size_t>(top.node)] = 2;
        stack.pop_back();
        continue;
      }
      const ArcId e = out[top.cursor++];
      if (flow[static_cast<std::size_t>(e)] <= eps) continue;
      const NodeId w = g.arc(e).head;
      if (color[static_cast<std::size_t>(w)] == 0) {
        color[static_cast<std::size_t>(w)] = 1;
        stack.push_back({w, e, 0});
      } else if (color[static_cast<std::size_t>(w)] == 1) {
        Path cycle{e};
        for (std::size_t i = stack.size() - 1; stack[i].node != w; --i) cycle.push_back(stack[i].via);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
    }
  }
  return {};
}

}  // namespace

void cancel_cycles(const Graph& graph, std::span<double> flow, double eps) {
  for (;;) {
    const Path cycle = find_cycle(graph, flow, eps);
    if (cycle.empty()) return;
    double amount = std::numeric_limits<double>::infinity();
    for (ArcId e : cycle) amount = std::min(amount, flow[static_cast<std::size_t>(e)]);
    for (ArcId e : cycle) flow[static_cast<std::size_t>(e)] -= amount;
    for (ArcId e : cycle) {
      if (flow[static_cast<std::size_t>(e)] <= eps) flow[static_cast<std::size_t>(e)] = 0.0;
    }
  }
}

std::optional<PeeledPath> peel_shortest_path(const Graph& graph, std::span<double> residual, NodeId origin,
                                             NodeId target, double limit, double eps) {
  if (target == origin) return std::nullopt;
  const auto n = static_cast<std::size_t>(graph.node_count());
  std::vector<ArcId> via(n, -1);
  std::vector<char> seen(n, 0);
  std::deque<NodeId> queue{origin};
  seen[static_cast<std::size_t>(origin)] = 1;
  while (!queue.empty() && !seen[static_cast<std::size_t>(target)]) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (ArcId e : graph.out_arcs(v)) {
      const auto h = static_cast<std::size_t>(graph.arc(e).head);
      if (residual[static_cast<std::size_t>(e)] <= eps || seen[h]) continue;
      seen[h] = 1;
      via[h] = e;
      queue.push_back(graph.arc(e).head);
    }
  }
  if (!seen[static_cast<std::size_t>(target)]) return std::nullopt;

  PeeledPath out;
  out.end = target;
  out.amount = limit;
  for (NodeId v = target; v != origin; v = graph.arc(via[static_cast<std::size_t>(v)]).tail) {
    const ArcId e = via[static_cast<std::size_t>(v)];
    out.path.push_back(e);
    out.amount = std::min(out.amount, residual[static_cast<std::size_t>(e)]);
  }
  std::reverse(out.path.begin(), out.path.end());
  for (ArcId e : out.path) {
    double& r = residual[static_cast<std::size_t>(e)];
    r -= out.amount;
    if (r <= eps) r = 0.0;
  }
  return out;
}

PathDistribution decompose(const Instance& instance, const FractionalSolution& solution,
                           std::span<const CommodityId> order) {
  const Graph& g = instance.graph;
  const auto arcs = static_cast<std::size_t>(g.arc_count());
  const auto nodes = static_cast<std::size_t>(g.node_count());
  const auto K = static_cast<std::size_t>(instance.commodity_count());

  std::vector<std::size_t> rank(K, K);
  for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = i;

  PathDistribution out;
  out.paths.resize(K);
  std::vector<std::vector<std::pair<Path, double>>> pieces(K);

  for (std::size_t gi = 0; gi < solution.groups.size(); ++gi) {
    const OriginGroup& grp = solution.groups[gi];
    std::vector<double> residual = solution.group_arc_flow[gi];
    if (residual.size() != arcs) throw Error("decompose: group flow size does not match the arc count");

    std::vector<double> sink(nodes, 0.0);
    std::vector<CommodityId> members = grp.members;
    std::stable_sort(members.begin(), members.end(), [&](CommodityId a, CommodityId b) {
      return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });
    double supply = 0.0;
    for (CommodityId k : members) {
      const Commodity& c = instance.commodities[static_cast<std::size_t>(k)];
      sink[static_cast<std::size_t>(c.destination)] += c.demand;
      supply += c.demand;
    }

    std::vector<double> net(nodes, 0.0);
    for (std::size_t e = 0; e < arcs; ++e) {
      net[static_cast<std::size_t>(g.arc(static_cast<ArcId>(e)).tail)] += residual[e];
      net[static_cast<std::size_t>(g.arc(static_cast<ArcId>(e)).head)] -= residual[e];
    }
    for (std::size_t v = 0; v < nodes; ++v) {
      const double expected = static_cast<NodeId>(v) == grp.origin ? supply : -sink[v];
      if (std::abs(net[v] - expected) > kConservationTol) {
        throw Error("decompose: group " + std::to_string(gi) + " (origin " +
                    std::to_string(grp.origin) + ") violates conservation at node " +
                    std::to_string(v) + " by " + std::to_string(net[v] - expected));
      }
    }

    // On an acyclic conserving flow every destination with unmet demand is
    // reachable from the origin, so each member is served by its own paths.
    // Members served early find more of the flow in place and split less.
    cancel_cycles(g, residual, kPeelEps);
    for (CommodityId k : members) {
      const Commodity& c = instance.commodities[static_cast<std::size_t>(k)];
      double w = c.demand;
      while (w > kPeelEps) {
        auto peeled = peel_shortest_path(g, residual, grp.origin, c.destination, w, kPeelEps);
        if (!peeled) break;
        w -= peeled->amount;
        pieces[static_cast<std::size_t>(k)].emplace_back(std::move(peeled->path), peeled->amount);
      }
      if (w > kConservationTol) {
        throw Error("decompose: group " + std::to_string(gi) + " delivers " + std::to_string(w) +
                    " too little to node " + std::to_string(c.destination));
      }
    }

    cancel_cycles(g, residual, kPeelEps);
    for (std::size_t e = 0; e < arcs; ++e) {
      if (residual[e] > kConservationTol) {
        throw Error("decompose: group " + std::to_string(gi) + " leaves " +
                    std::to_string(residual[e]) + " unattributed flow on arc " + std::to_string(e));
      }
    }
  }

  for (std::size_t k = 0; k < K; ++k) {
    if (pieces[k].empty()) continue;
    const double demand = instance.commodities[k].demand;
    auto& dist = out.paths[k];
    for (auto& [path, amount] : pieces[k]) {
      auto same = std::find_if(dist.begin(), dist.end(), [&](const WeightedPath& w) { return w.path == path; });
      if (same != dist.end()) same->weight += amount;
      else dist.push_back(WeightedPath{std::move(path), amount});
    }
    std::erase_if(dist, [&](const WeightedPath& w) { return w.weight < kFragment * demand; });
    double total = 0.0;
    for (const WeightedPath& w : dist) total += w.weight;
    if (dist.empty() || !(total > 0.0)) {
      throw Error("decompose: commodity " + std::to_string(k) + " received no flow");
    }
    for (WeightedPath& w : dist) w.weight /= total;
  }
  return out;
}

std::vector<double> commodity_arc_load(const Graph& graph, std::span<const WeightedPath> paths,
                                       double demand) {
  std::vector<double> load(static_cast<std::size_t>(graph.arc_count()), 0.0);
  for (const WeightedPath& w : paths) {
    for (ArcId e : w.path) load[static_cast<std::size_t>(e)] += w.weight * demand;
  }
  return load;
}

}  // namespace uflow
