#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uflow/core.hpp"

namespace uflow {

// Up to k loopless origin-destination paths of fewest hops, sorted by hop
// count and then lexicographically by arc index. Throws Error when the
// destination is unreachable or k < 1.
std::vector<Path> k_shortest_paths(const Graph& graph, NodeId origin, NodeId destination, int k);

struct SaConfig {
  int k_paths = 10;
  double t_initial = 200.0;
  double t_final = 1.0;
  std::optional<std::int64_t> iterations;  // default ceil(2 |K|^1.5)
  std::uint64_t seed = 0;
  // Every this many iterations the incremental cost is checked against a
  // full recomputation and resynchronized.
  std::int64_t verify_every = 1000;
};

struct SaResult {
  PathAssignment assignment;  // best seen
  Metrics metrics;
  std::int64_t iterations = 0;
  std::int64_t accepted = 0;
  double initial_overflow = 0.0;
  // Best overflow seen so far, sampled at every verification checkpoint.
  std::vector<double> best_at_checkpoint;
  // Largest |incremental - recomputed| cost difference met at a checkpoint.
  double max_bookkeeping_drift = 0.0;
};

std::int64_t default_sa_iterations(const Instance& instance);

// Simulated annealing over per-commodity candidate lists. Each step picks a
// commodity and one of its candidates uniformly (the current one included)
// and accepts with probability min(1, exp(-delta/T)); T falls geometrically
// from t_initial to t_final over the run.
SaResult run_sa(const Instance& instance, const SaConfig& config);

}  // namespace uflow
