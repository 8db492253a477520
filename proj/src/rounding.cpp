#include "uflow/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace uflow {

namespace {

// Independent RNG streams derived from the run seed.
constexpr std::uint64_t kRoundingStream = 1;
constexpr std::uint64_t kOrderStream = 2;

OrderRule default_order(Variant v) {
  switch (v) {
    case Variant::kRr: return OrderRule::kInput;
    case Variant::kSrrUnsorted: return OrderRule::kShuffled;
    default: return OrderRule::kDecreasingDemand;
  }
}

struct Sequential {
  int theta = std::numeric_limits<int>::max();
  bool csrr = false;
  double beta = 1.0;
  Objective objective = Objective::kOverflowSum;
};

RoundingResult run_sequential(const Instance& instance, const RoundingConfig& config,
                              const Sequential& mode, const lp::LpBackend& backend) {
  const Graph& g = instance.graph;
  const auto K = static_cast<std::size_t>(instance.commodity_count());
  const auto arcs = static_cast<std::size_t>(g.arc_count());

  RoundingResult out;
  Rng order_rng(mix_seed(config.seed, kOrderStream));
  out.order = commodity_order(instance, config.order.value_or(default_order(config.variant)), order_rng);
  Rng rng(mix_seed(config.seed, kRoundingStream));

  FixedPaths fixed(K);
  WarmStart warm;
  RelaxationConfig relax{mode.objective, std::nullopt};
  std::vector<double> footprint(arcs, 0.0);
  int fixed_count = 0;

  FractionalSolution sol;
  PathDistribution dist;
  auto actualize = [&] {
    sol = solve_relaxation(instance, fixed, relax, backend, &warm);
    dist = decompose(instance, sol, out.order);
    out.lp_solves += sol.lp_solves;
    out.lp_iterations += sol.lp_iterations;
    if (!config.record_trace) return;
    SolveRecord rec;
    rec.fixed_count = fixed_count;
    rec.objective_value = sol.objective_value;
    rec.free_load.assign(arcs, 0.0);
    for (const auto& flow : sol.group_arc_flow) {
      for (std::size_t e = 0; e < arcs; ++e) rec.free_load[e] += flow[e];
    }
    for (CommodityId k : out.order) {
      if (dist.paths[static_cast<std::size_t>(k)].size() > 1) rec.split.push_back(k);
    }
    rec.csrr_rows_added = sol.csrr_rows_added;
    rec.csrr_slack = sol.csrr_slack;
    out.trace.push_back(std::move(rec));
  };

  actualize();
  out.delta_star = sol.congestion;
  if (mode.csrr) {
    if (!(out.delta_star > 0.0)) throw Error("csrr: first relaxation has zero congestion");
    relax.csrr = CsrrRows{out.delta_star, mode.beta, footprint};
  }

  int counter = 0;
  for (CommodityId k : out.order) {
    if (counter >= mode.theta) {
      if (mode.csrr) relax.csrr->footprint_load = footprint;
      actualize();
      counter = 0;
    }
    const auto& support = dist.paths[static_cast<std::size_t>(k)];
    const double demand = instance.commodities[static_cast<std::size_t>(k)].demand;
    fixed[static_cast<std::size_t>(k)] = round_once(support, rng);
    if (mode.csrr) {
      for (const WeightedPath& w : support) {
        for (ArcId e : w.path) footprint[static_cast<std::size_t>(e)] += w.weight * demand;
      }
    }
    if (support.size() >= 2) {
      ++counter;
      ++out.split_fixed;
    }
    ++fixed_count;
  }

  out.assignment.paths.reserve(K);
  for (auto& p : fixed) out.assignment.paths.push_back(std::move(*p));
  out.metrics = evaluate(instance, out.assignment);
  return out;
}

}  // namespace

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::kRr: return "rr";
    case Variant::kRrSorted: return "rr-sorted";
    case Variant::kSrr: return "srr";
    case Variant::kSrrUnsorted: return "srr-unsorted";
    case Variant::kCsrr: return "csrr";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), '_', '-');
  for (Variant v : {Variant::kRr, Variant::kRrSorted, Variant::kSrr, Variant::kSrrUnsorted, Variant::kCsrr}) {
    if (t == to_string(v)) return v;
  }
  throw Error("unknown rounding variant '" + text + "'");
}

int default_theta(const Instance& instance) {
  return std::max(1, (instance.graph.node_count() + 3) / 4);
}

std::vector<CommodityId> commodity_order(const Instance& instance, OrderRule rule, Rng& rng) {
  std::vector<CommodityId> order(static_cast<std::size_t>(instance.commodity_count()));
  std::iota(order.begin(), order.end(), 0);
  if (rule == OrderRule::kDecreasingDemand) {
    std::stable_sort(order.begin(), order.end(), [&](CommodityId a, CommodityId b) {
      return instance.commodities[static_cast<std::size_t>(a)].demand >
             instance.commodities[static_cast<std::size_t>(b)].demand;
    });
  } else if (rule == OrderRule::kShuffled) {
    rng.shuffle(std::span<CommodityId>(order));
  }
  return order;
}

const Path& round_once(std::span<const WeightedPath> distribution, Rng& rng) {
  if (distribution.empty()) throw Error("round_once: empty support");
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (const WeightedPath& w : distribution) {
    cumulative += w.weight;
    if (cumulative > u) return w.path;
  }
  // Rounding left the total a hair below u: take the last positive path.
  for (auto it = distribution.rbegin(); it != distribution.rend(); ++it) {
    if (it->weight > 0.0) return it->path;
  }
  throw Error("round_once: support has no positive weight");
}

RoundingResult run_rr(const Instance& instance, const RoundingConfig& config,
                      const lp::LpBackend& backend) {
  if (config.variant != Variant::kRr && config.variant != Variant::kRrSorted) {
    throw Error("run_rr: variant must be rr or rr-sorted");
  }
  return run_sequential(instance, config, Sequential{.objective = config.objective}, backend);
}

RoundingResult run_srr(const Instance& instance, const RoundingConfig& config,
                       const lp::LpBackend& backend) {
  if (config.variant != Variant::kSrr && config.variant != Variant::kSrrUnsorted) {
    throw Error("run_srr: variant must be srr or srr-unsorted");
  }
  const int theta = config.theta.value_or(default_theta(instance));
  if (theta < 1) throw Error("run_srr: theta must be >= 1");
  return run_sequential(instance, config, Sequential{.theta = theta, .objective = config.objective}, backend);
}

RoundingResult run_csrr(const Instance& instance, const RoundingConfig& config,
                        const lp::LpBackend& backend) {
  if (config.variant != Variant::kCsrr) throw Error("run_csrr: variant must be csrr");
  const int theta = config.theta.value_or(default_theta(instance));
  if (theta < 1) throw Error("run_csrr: theta must be >= 1");
  if (!(config.beta >= 1.0)) throw Error("run_csrr: beta must be >= 1");
  return run_sequential(
      instance, config,
      Sequential{.theta = theta, .csrr = true, .beta = config.beta, .objective = Objective::kCongestion},
      backend);
}

RoundingResult run_rounding(const Instance& instance, const RoundingConfig& config,
                            const lp::LpBackend& backend) {
  switch (config.variant) {
    case Variant::kRr:
    case Variant::kRrSorted: return run_rr(instance, config, backend);
    case Variant::kSrr:
    case Variant::kSrrUnsorted: return run_srr(instance, config, backend);
    case Variant::kCsrr: return run_csrr(instance, config, backend);
  }
  throw Error("run_rounding: unknown variant");
}

}  // namespace uflow
