#include "uflow/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace uflow {

namespace {

constexpr double kUnlimited = std::numeric_limits<double>::infinity();

std::vector<char> search(const Graph& g, std::span<const double> residual, NodeId start,
                         double min_residual, bool forward) {
  std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<NodeId> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (ArcId e : forward ? g.out_arcs(v) : g.in_arcs(v)) {
      if (!residual.empty() && residual[static_cast<std::size_t>(e)] < min_residual) continue;
      const NodeId w = forward ? g.arc(e).head : g.arc(e).tail;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

// Depth-first walk from `from` to `to` over arcs with residual >= 1, where
// the order in which a node's newly discovered neighbours are visited is
// shuffled. Returns the arcs of the first path that reaches `to`.
Path random_dfs_path(const Graph& g, std::span<const double> residual, NodeId from, NodeId to,
                     Rng& rng) {
  struct Frame {
    NodeId node;
    ArcId via;
    std::vector<ArcId> next;
    std::size_t cursor = 0;
  };
  std::vector<char> visited(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<Frame> stack;
  auto expand = [&](NodeId v, ArcId via) {
    visited[static_cast<std::size_t>(v)] = 1;
    Frame f{v, via, {}, 0};
    for (ArcId e : g.out_arcs(v)) {
      if (residual[static_cast<std::size_t>(e)] >= 1.0 &&
          !visited[static_cast<std::size_t>(g.arc(e).head)]) {
        f.next.push_back(e);
      }
    }
    rng.shuffle(std::span<ArcId>(f.next));
    stack.push_back(std::move(f));
  };
  expand(from, -1);
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.node == to) break;
    if (top.cursor == top.next.size()) {
      stack.pop_back();
      continue;
    }
    const ArcId e = top.next[top.cursor++];
    const NodeId w = g.arc(e).head;
    if (visited[static_cast<std::size_t>(w)]) continue;
    expand(w, e);
  }
  if (stack.empty()) throw Error("generate_demands: destination unreachable in residual graph");
  Path p;
  for (std::size_t i = 1; i < stack.size(); ++i) p.push_back(stack[i].via);
  return p;
}

Instance finish_instance(Graph graph, std::span<const NodeId> origins, int max_demand, Rng& rng) {
  DemandSet demands = generate_demands(graph, origins, max_demand, rng);
  Instance instance;
  instance.graph = std::move(graph);
  instance.commodities = std::move(demands.commodities);
  instance.witness = std::move(demands.witness);
  return instance;
}

}  // namespace

std::vector<char> reverse_reachable(const Graph& graph, std::span<const double> residual,
                                    NodeId target, double min_residual) {
  return search(graph, residual, target, min_residual, false);
}

std::vector<char> forward_reachable(const Graph& graph, std::span<const double> residual,
                                    NodeId source, double min_residual) {
  return search(graph, residual, source, min_residual, true);
}

bool is_strongly_connected(const Graph& graph) {
  if (graph.node_count() == 0) return true;
  auto all = [](const std::vector<char>& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c != 0; });
  };
  return all(search(graph, {}, 0, 0.0, true)) && all(search(graph, {}, 0, 0.0, false));
}

DemandSet generate_demands(const Graph& graph, std::span<const NodeId> origins, int max_demand,
                           Rng& rng) {
  if (origins.empty()) throw Error("generate_demands: no origin nodes");
  if (max_demand < 1) throw Error("generate_demands: max_demand must be >= 1");
  std::vector<double> residual(static_cast<std::size_t>(graph.arc_count()));
  for (ArcId e = 0; e < graph.arc_count(); ++e) {
    residual[static_cast<std::size_t>(e)] = graph.arc(e).capacity;
    if (!(graph.arc(e).capacity > 0.0)) throw Error("generate_demands: nonpositive capacity");
  }
  std::vector<char> is_origin(static_cast<std::size_t>(graph.node_count()), 0);
  for (NodeId o : origins) is_origin[static_cast<std::size_t>(o)] = 1;
  std::vector<NodeId> destinations;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (!is_origin[static_cast<std::size_t>(v)]) destinations.push_back(v);
  }

  DemandSet out;
  std::vector<NodeId> candidates;
  while (!destinations.empty()) {
    const std::size_t slot = rng.uniform_index(destinations.size());
    const NodeId d = destinations[slot];
    const auto reach = reverse_reachable(graph, residual, d, 1.0);
    candidates.clear();
    for (NodeId o : origins) {
      if (reach[static_cast<std::size_t>(o)]) candidates.push_back(o);
    }
    if (candidates.empty()) {
      // Residuals only shrink, so this destination stays unreachable.
      destinations.erase(destinations.begin() + static_cast<std::ptrdiff_t>(slot));
      continue;
    }
    const NodeId o = candidates[rng.uniform_index(candidates.size())];
    Path path = random_dfs_path(graph, residual, o, d, rng);
    double bottleneck = kUnlimited;
    for (ArcId e : path) bottleneck = std::min(bottleneck, residual[static_cast<std::size_t>(e)]);
    double demand = static_cast<double>(rng.uniform_int(1, max_demand));
    demand = std::min(demand, std::floor(bottleneck));
    for (ArcId e : path) residual[static_cast<std::size_t>(e)] -= demand;
    out.commodities.push_back(Commodity{o, d, demand});
    out.witness.push_back(std::move(path));
  }
  return out;
}

Instance generate_grid(const GridSpec& spec) {
  const int n = spec.n;
  if (n < 2) throw Error("generate_grid: n must be >= 2");
  if (!(spec.capacity > 0.0)) throw Error("generate_grid: capacity must be positive");
  const int grid_nodes = n * n;
  const int p = n;
  const int q = 2 * n;
  Rng rng(spec.seed);

  std::vector<Arc> arcs;
  std::set<std::pair<NodeId, NodeId>> edges;
  auto add_edge = [&](NodeId u, NodeId v) {
    if (!edges.emplace(std::min(u, v), std::max(u, v)).second) return;  // n = 2 wraps onto itself
    arcs.push_back(Arc{u, v, spec.capacity});
    arcs.push_back(Arc{v, u, spec.capacity});
  };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const NodeId v = r * n + c;
      add_edge(v, r * n + (c + 1) % n);
      add_edge(v, ((r + 1) % n) * n + c);
    }
  }

  std::vector<NodeId> origins;
  std::vector<NodeId> pool(static_cast<std::size_t>(grid_nodes));
  for (int t = 0; t < p; ++t) {
    const NodeId o = grid_nodes + t;
    origins.push_back(o);
    std::vector<NodeId> targets;
    if (spec.origin_links == OriginLinks::kDistinct) {
      for (int v = 0; v < grid_nodes; ++v) pool[static_cast<std::size_t>(v)] = v;
      for (int i = 0; i < q; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       rng.uniform_index(static_cast<std::uint64_t>(grid_nodes - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        targets.push_back(pool[static_cast<std::size_t>(i)]);
      }
    } else {
      std::set<NodeId> chosen;
      for (int i = 0; i < q; ++i) {
        const auto v = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(grid_nodes)));
        if (chosen.insert(v).second) targets.push_back(v);
      }
    }
    for (NodeId v : targets) arcs.push_back(Arc{o, v, spec.capacity});
  }

  Graph graph(grid_nodes + p, std::move(arcs));
  return finish_instance(std::move(graph), origins, spec.max_demand, rng);
}

Instance generate_random_connected(const RandomGraphSpec& spec) {
  const int nodes = spec.node_count;
  if (nodes < 2) throw Error("generate_random_connected: node_count must be >= 2");
  if (spec.average_degree < 2.0) throw Error("generate_random_connected: average_degree must be >= 2");
  if (!(spec.capacity > 0.0)) throw Error("generate_random_connected: capacity must be positive");
  Rng rng(spec.seed);

  std::vector<Arc> arcs;
  std::set<std::pair<NodeId, NodeId>> present;
  auto current = [&] { return Graph(nodes, arcs); };

  Graph g = current();
  while (!is_strongly_connected(g)) {
    const auto u = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(nodes)));
    const auto reach = forward_reachable(g, {}, u, 0.0);
    std::vector<NodeId> unreachable;
    for (NodeId v = 0; v < nodes; ++v) {
      if (!reach[static_cast<std::size_t>(v)]) unreachable.push_back(v);
    }
    if (unreachable.empty()) continue;
    const NodeId v = unreachable[rng.uniform_index(unreachable.size())];
    arcs.push_back(Arc{u, v, spec.capacity});
    present.emplace(u, v);
    g = current();
  }

  const auto target = static_cast<std::size_t>(std::ceil(spec.average_degree * nodes - 1e-9));
  const auto max_arcs = static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes - 1);
  while (arcs.size() < std::min(target, max_arcs)) {
    const auto u = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(nodes)));
    const auto v = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(nodes)));
    if (u == v || !present.emplace(u, v).second) continue;
    arcs.push_back(Arc{u, v, spec.capacity});
  }

  std::vector<char> is_origin(static_cast<std::size_t>(nodes), 0);
  for (auto& flag : is_origin) flag = rng.uniform01() < spec.origin_probability ? 1 : 0;
  const auto count = std::count(is_origin.begin(), is_origin.end(), 1);
  if (count == 0) is_origin[rng.uniform_index(static_cast<std::uint64_t>(nodes))] = 1;
  if (count == nodes) is_origin[rng.uniform_index(static_cast<std::uint64_t>(nodes))] = 0;
  std::vector<NodeId> origins;
  for (NodeId v = 0; v < nodes; ++v) {
    if (is_origin[static_cast<std::size_t>(v)]) origins.push_back(v);
  }
  return finish_instance(Graph(nodes, std::move(arcs)), origins, spec.max_demand, rng);
}

}  // namespace uflow
