#include "uflow/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "uflow/random.hpp"

namespace uflow {

namespace {

constexpr std::uint64_t kAnnealingStream = 3;

// Lexicographically smallest fewest-hop path from s to t that avoids the
// blocked nodes and arcs; nullopt when none exists.
std::optional<Path> shortest_path(const Graph& g, NodeId s, NodeId t,
                                  const std::vector<char>& blocked_node,
                                  const std::vector<char>& blocked_arc) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<int> dist(n, -1);
  std::vector<NodeId> queue{t};
  dist[static_cast<std::size_t>(t)] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const NodeId v = queue[i];
    for (ArcId e : g.in_arcs(v)) {
      const NodeId u = g.arc(e).tail;
      if (blocked_arc[static_cast<std::size_t>(e)] || blocked_node[static_cast<std::size_t>(u)] ||
          dist[static_cast<std::size_t>(u)] >= 0) {
        continue;
      }
      dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
      queue.push_back(u);
    }
  }
  if (dist[static_cast<std::size_t>(s)] < 0) return std::nullopt;
  Path path;
  for (NodeId v = s; v != t;) {
    for (ArcId e : g.out_arcs(v)) {
      const NodeId h = g.arc(e).head;
      if (!blocked_arc[static_cast<std::size_t>(e)] &&
          dist[static_cast<std::size_t>(h)] == dist[static_cast<std::size_t>(v)] - 1) {
        path.push_back(e);
        v = h;
        break;
      }
    }
  }
  return path;
}

}  // namespace

// Yen's algorithm. Spur paths and the candidate pool share the (hops, arc
// sequence) order, so ties resolve to the lexicographically first paths.
std::vector<Path> k_shortest_paths(const Graph& graph, NodeId origin, NodeId destination, int k) {
  if (k < 1) throw Error("k_shortest_paths: k must be >= 1");
  if (origin < 0 || origin >= graph.node_count() || destination < 0 || destination >= graph.node_count()) {
    throw Error("k_shortest_paths: node out of range");
  }
  const auto n = static_cast<std::size_t>(graph.node_count());
  const auto m = static_cast<std::size_t>(graph.arc_count());
  std::vector<char> blocked_node(n, 0), blocked_arc(m, 0);
  auto first = shortest_path(graph, origin, destination, blocked_node, blocked_arc);
  if (!first) {
    throw Error("k_shortest_paths: node " + std::to_string(destination) + " unreachable from node " +
                std::to_string(origin));
  }
  std::vector<Path> found{std::move(*first)};
  std::set<std::pair<std::size_t, Path>> pool;
  while (static_cast<int>(found.size()) < k) {
    const Path& prev = found.back();
    NodeId spur = origin;
    for (std::size_t j = 0; j < prev.size(); ++j) {
      std::fill(blocked_arc.begin(), blocked_arc.end(), 0);
      for (const Path& p : found) {
        if (p.size() > j && std::equal(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(j), p.begin())) {
          blocked_arc[static_cast<std::size_t>(p[j])] = 1;
        }
      }
      if (auto tail = shortest_path(graph, spur, destination, blocked_node, blocked_arc)) {
        Path candidate(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(j));
        candidate.insert(candidate.end(), tail->begin(), tail->end());
        if (std::find(found.begin(), found.end(), candidate) == found.end()) {
          pool.emplace(candidate.size(), std::move(candidate));
        }
      }
      // The root grows by one arc; its nodes stay off-limits for later spurs.
      blocked_node[static_cast<std::size_t>(spur)] = 1;
      spur = graph.arc(prev[j]).head;
    }
    std::fill(blocked_node.begin(), blocked_node.end(), 0);
    if (pool.empty()) break;
    found.push_back(pool.begin()->second);
    pool.erase(pool.begin());
  }
  return found;
}

std::int64_t default_sa_iterations(const Instance& instance) {
  const double k = static_cast<double>(instance.commodity_count());
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(2.0 * std::pow(k, 1.5))));
}

SaResult run_sa(const Instance& instance, const SaConfig& config) {
  if (!(config.t_initial > config.t_final && config.t_final > 0.0)) {
    throw Error("run_sa: temperatures must satisfy t_initial > t_final > 0");
  }
  if (config.k_paths < 1) throw Error("run_sa: k_paths must be >= 1");
  if (config.verify_every < 1) throw Error("run_sa: verify_every must be >= 1");
  const std::int64_t iterations = config.iterations.value_or(default_sa_iterations(instance));
  if (iterations < 1) throw Error("run_sa: iterations must be >= 1");

  const Graph& g = instance.graph;
  const std::size_t K = instance.commodities.size();
  std::map<std::pair<NodeId, NodeId>, std::vector<Path>> cache;
  std::vector<const std::vector<Path>*> candidates(K);
  for (std::size_t k = 0; k < K; ++k) {
    const Commodity& c = instance.commodities[k];
    auto [it, fresh] = cache.try_emplace({c.origin, c.destination});
    if (fresh) it->second = k_shortest_paths(g, c.origin, c.destination, config.k_paths);
    candidates[k] = &it->second;
  }

  Rng rng(mix_seed(config.seed, kAnnealingStream));
  std::vector<std::size_t> choice(K);
  for (std::size_t k = 0; k < K; ++k) choice[k] = rng.uniform_index(candidates[k]->size());

  auto assignment_of = [&] {
    PathAssignment a;
    a.paths.reserve(K);
    for (std::size_t k = 0; k < K; ++k) a.paths.push_back((*candidates[k])[choice[k]]);
    return a;
  };
  Metrics start = evaluate(instance, assignment_of());
  std::vector<double> load = std::move(start.arc_load);
  double cost = start.overflow_sum;

  auto over = [&](ArcId e) {
    return std::max(0.0, load[static_cast<std::size_t>(e)] - g.arc(e).capacity);
  };
  // Moves demand between paths in place and returns the cost change.
  auto shift = [&](const Path& from, const Path& to, double demand) {
    double delta = 0.0;
    for (ArcId e : from) {
      const double before = over(e);
      load[static_cast<std::size_t>(e)] -= demand;
      delta += over(e) - before;
    }
    for (ArcId e : to) {
      const double before = over(e);
      load[static_cast<std::size_t>(e)] += demand;
      delta += over(e) - before;
    }
    return delta;
  };

  SaResult out;
  out.initial_overflow = cost;
  out.iterations = iterations;
  double best = cost;
  // Accepted moves since the best state, undone at the end to restore it.
  std::vector<std::pair<std::size_t, std::size_t>> journal;
  const double factor = std::pow(config.t_final / config.t_initial, 1.0 / static_cast<double>(iterations));
  double temperature = config.t_initial;

  for (std::int64_t it = 1; it <= iterations; ++it) {
    temperature *= factor;
    const std::size_t k = rng.uniform_index(K);
    const std::size_t j = rng.uniform_index(candidates[k]->size());
    if (j == choice[k]) {
      ++out.accepted;
    } else {
      const Path& from = (*candidates[k])[choice[k]];
      const Path& to = (*candidates[k])[j];
      const double demand = instance.commodities[k].demand;
      const double delta = shift(from, to, demand);
      if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temperature)) {
        ++out.accepted;
        journal.emplace_back(k, choice[k]);
        choice[k] = j;
        cost += delta;
        if (cost < best) {
          best = cost;
          journal.clear();
        }
      } else {
        shift(to, from, demand);
      }
    }
    if (it % config.verify_every == 0) {
      Metrics full = evaluate(instance, assignment_of());
      out.max_bookkeeping_drift = std::max(out.max_bookkeeping_drift, std::abs(full.overflow_sum - cost));
      cost = full.overflow_sum;
      load = std::move(full.arc_load);
      out.best_at_checkpoint.push_back(best);
    }
  }

  for (auto it = journal.rbegin(); it != journal.rend(); ++it) choice[it->first] = it->second;
  out.assignment = assignment_of();
  out.metrics = evaluate(instance, out.assignment);
  return out;
}

}  // namespace uflow
