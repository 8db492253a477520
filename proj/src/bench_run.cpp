#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "uflow/bench.hpp"
#include "uflow/instance_gen.hpp"
#include "uflow/instance_io.hpp"
#include "uflow/random.hpp"

namespace uflow::bench {

namespace {

// Instances shared between groups are generated once.
struct Slot {
  std::shared_ptr<const Instance> instance;
  std::uint64_t seed = 0;
  std::string error;
};

Instance generate_for(const ExperimentSpec& s, std::size_t group, std::uint64_t seed) {
  GridSpec grid{.n = s.grid_n, .seed = seed, .capacity = s.capacity, .max_demand = s.max_demand};
  switch (s.dataset) {
    case Dataset::kGridSizeSweep:
    case Dataset::kOrderStudy:
      grid.n = s.sizes[group];
      return generate_grid(grid);
    case Dataset::kRandomSizeSweep:
      return generate_random_connected(RandomGraphSpec{.node_count = s.sizes[group],
                                                       .average_degree = s.average_degree,
                                                       .origin_probability = s.origin_probability,
                                                       .seed = seed,
                                                       .capacity = s.capacity,
                                                       .max_demand = s.max_demand});
    case Dataset::kCommoditySweep:
      grid.capacity = s.scales[group].capacity;
      grid.max_demand = s.scales[group].max_demand;
      return generate_grid(grid);
    case Dataset::kThetaSweep:
    case Dataset::kObjectiveStudy:
      return generate_grid(grid);
  }
  throw Error("unknown dataset");
}

bool groups_share_instances(Dataset d) {
  return d == Dataset::kThetaSweep || d == Dataset::kObjectiveStudy;
}

std::vector<Group> groups_of(const ExperimentSpec& s) {
  std::vector<Group> g;
  switch (s.dataset) {
    case Dataset::kGridSizeSweep:
    case Dataset::kOrderStudy:
      for (int n : s.sizes) g.push_back({"n=" + std::to_string(n), n});
      break;
    case Dataset::kRandomSizeSweep:
      for (int n : s.sizes) g.push_back({"nodes=" + std::to_string(n), n});
      break;
    case Dataset::kCommoditySweep:
      for (const auto& c : s.scales) {
        g.push_back({"capacity=" + format_number(c.capacity) + ":max_demand=" + std::to_string(c.max_demand),
                     c.capacity});
      }
      break;
    case Dataset::kThetaSweep:
      for (const auto& t : s.thetas) {
        std::optional<double> v;
        if (t.kind == ThetaRule::Kind::kValue) v = t.value;
        g.push_back({"theta=" + t.label, v});
      }
      break;
    case Dataset::kObjectiveStudy:
      for (Objective o : s.objectives) g.push_back({std::string("objective=") + to_string(o), std::nullopt});
      break;
  }
  return g;
}

void run_one(const ExperimentSpec& s, std::size_t group, const AlgorithmSpec& algo,
             const Instance& inst, ResultRow& row) {
  const auto start = std::chrono::steady_clock::now();
  Metrics metrics;
  if (algo.annealing) {
    SaConfig sa;
    sa.k_paths = algo.k_paths;
    sa.seed = row.seed;
    sa.iterations = algo.sa_iterations.value_or(std::max<std::int64_t>(
        1, std::llround(static_cast<double>(default_sa_iterations(inst)) * algo.sa_iterations_scale)));
    metrics = run_sa(inst, sa).metrics;
  } else {
    RoundingConfig rc = algo.rounding;
    rc.seed = row.seed;
    if (s.dataset == Dataset::kThetaSweep) rc.theta = s.thetas[group].resolve(inst);
    if (s.dataset == Dataset::kObjectiveStudy) rc.objective = s.objectives[group];
    const RoundingResult r = run_rounding(inst, rc);
    metrics = r.metrics;
    row.lp_solves = r.lp_solves;
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  row.overflow_sum = metrics.overflow_sum;
  row.overflow_ratio = row.total_demand > 0 ? metrics.overflow_sum / row.total_demand : 0.0;
  row.congestion = metrics.congestion;
}

// Runs fn(i) for i in [0, count) on `jobs` threads.
template <typename Fn>
void parallel_for(int count, int jobs, Fn fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next++) < count;) fn(i);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::clamp(jobs, 1, std::max(1, count)); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  validate_spec(spec);
  ResultTable table;
  table.spec = spec;
  table.groups = groups_of(spec);
  const bool files = !spec.instance_files.empty();
  const int per_group = files ? static_cast<int>(spec.instance_files.size()) : spec.instances_per_group;
  const bool shared = files || groups_share_instances(spec.dataset);
  const auto G = table.groups.size();

  // slots[g][i]; shared datasets point every group at group 0's instances.
  std::vector<std::vector<Slot>> slots(shared ? 1 : G, std::vector<Slot>(static_cast<std::size_t>(per_group)));
  parallel_for(static_cast<int>(slots.size()) * per_group, options.jobs, [&](int t) {
    const auto g = static_cast<std::size_t>(t / per_group);
    const auto i = static_cast<std::size_t>(t % per_group);
    Slot& slot = slots[g][i];
    slot.seed = spec.base_seed + i;
    try {
      slot.instance = std::make_shared<const Instance>(
          files ? load_instance(spec.instance_files[i]) : generate_for(spec, g, slot.seed));
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  const auto A = spec.algorithms.size();
  const auto S = static_cast<std::size_t>(spec.seeds);
  table.rows.resize(G * static_cast<std::size_t>(per_group) * A * S);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ResultRow& row = table.rows[r];
    std::size_t rest = r;
    row.seed_index = static_cast<int>(rest % S);
    rest /= S;
    row.algorithm = static_cast<int>(rest % A);
    rest /= A;
    row.instance = static_cast<int>(rest % static_cast<std::size_t>(per_group));
    row.group = static_cast<int>(rest / static_cast<std::size_t>(per_group));
  }

  std::mutex progress_mutex;
  std::atomic<int> done{0};
  const int total = static_cast<int>(table.rows.size());
  parallel_for(total, options.jobs, [&](int r) {
    ResultRow& row = table.rows[static_cast<std::size_t>(r)];
    const auto g = static_cast<std::size_t>(row.group);
    const Slot& slot = slots[shared ? 0 : g][static_cast<std::size_t>(row.instance)];
    row.instance_seed = slot.seed;
    row.seed = mix_seed(slot.seed, static_cast<std::uint64_t>(row.seed_index));
    if (!slot.instance) {
      row.error = "instance: " + slot.error;
    } else {
      const Instance& inst = *slot.instance;
      row.nodes = inst.graph.node_count();
      row.arcs = inst.graph.arc_count();
      row.commodities = inst.commodity_count();
      row.total_demand = inst.total_demand();
      try {
        run_one(spec, g, spec.algorithms[static_cast<std::size_t>(row.algorithm)], inst, row);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
    const int finished = ++done;
    if (options.progress) {
      std::lock_guard lock(progress_mutex);
      options.progress(finished, total);
    }
  });
  return table;
}

std::vector<const ResultRow*> cell(const ResultTable& table, int group, int algorithm) {
  std::vector<const ResultRow*> out;
  for (const ResultRow& r : table.rows) {
    if (r.group == group && r.algorithm == algorithm && r.error.empty()) out.push_back(&r);
  }
  return out;
}

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::kOverflowRatio: return "overflow_ratio";
    case Metric::kCongestion: return "congestion";
    case Metric::kWallSeconds: return "wall_seconds";
    case Metric::kLpSolves: return "lp_solves";
  }
  return "unknown";
}

double metric_value(const ResultRow& row, Metric metric) {
  switch (metric) {
    case Metric::kOverflowRatio: return row.overflow_ratio;
    case Metric::kCongestion: return row.congestion;
    case Metric::kWallSeconds: return row.wall_seconds;
    case Metric::kLpSolves: return row.lp_solves;
  }
  return 0.0;
}

Paired paired_values(const ResultTable& table, int group_a, int algorithm_a, int group_b,
                     int algorithm_b, Metric metric) {
  std::map<std::pair<int, int>, double> b_values;
  for (const ResultRow* r : cell(table, group_b, algorithm_b)) {
    b_values[{r->instance, r->seed_index}] = metric_value(*r, metric);
  }
  Paired out;
  for (const ResultRow* r : cell(table, group_a, algorithm_a)) {
    const auto it = b_values.find({r->instance, r->seed_index});
    if (it == b_values.end()) continue;
    out.a.push_back(metric_value(*r, metric));
    out.b.push_back(it->second);
  }
  return out;
}

}  // namespace uflow::bench
