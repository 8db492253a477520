#include "uflow/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "uflow/decompose.hpp"
#include "uflow/instance_gen.hpp"

namespace uflow {

namespace {

constexpr double kMixedSlack = 1e-9;
// CSRR rows are added only when the unrestricted optimum exceeds one of them
// by more than this.
constexpr double kCsrrViolation = 1e-9;

// Reuses a basis from a problem with the same columns and a prefix of the
// rows; new rows enter with their logical basic.
const lp::Basis* adapt(lp::Basis& basis, const lp::LpProblem& problem) {
  if (basis.empty() || static_cast<int>(basis.columns.size()) != problem.column_count() ||
      static_cast<int>(basis.rows.size()) > problem.row_count()) {
    return nullptr;
  }
  basis.rows.resize(static_cast<std::size_t>(problem.row_count()), lp::VarStatus::kBasic);
  return &basis;
}

lp::LpSolution run(const lp::LpBackend& backend, const lp::LpProblem& problem, lp::Basis* basis,
                   FractionalSolution& out, const char* what) {
  lp::SolveOptions options;
  if (basis != nullptr) options.warm_start = adapt(*basis, problem);
  lp::LpSolution s = backend.solve(problem, options);
  ++out.lp_solves;
  out.lp_iterations += s.iterations;
  if (s.status != lp::LpStatus::kOptimal) {
    throw Error(std::string("relaxation: ") + what + " LP is " + lp::to_string(s.status));
  }
  if (basis != nullptr) *basis = s.basis;
  return s;
}

std::vector<double> free_loads(const Relaxation& r, const lp::LpSolution& s, ArcId arcs) {
  std::vector<double> load(static_cast<std::size_t>(arcs), 0.0);
  for (const auto& cols : r.flow_column) {
    for (ArcId e = 0; e < arcs; ++e) {
      const int c = cols[static_cast<std::size_t>(e)];
      if (c >= 0) load[static_cast<std::size_t>(e)] += std::max(0.0, s.values[static_cast<std::size_t>(c)]);
    }
  }
  return load;
}

// Budget left for free flow on arc e. A footprint that exhausts the budget
// up to accumulation roundoff (relative 1e-9) counts as exactly zero.
double csrr_rhs(const Instance& instance, const CsrrRows& csrr, ArcId e) {
  const double budget = csrr.beta * instance.graph.arc(e).capacity * csrr.delta_star;
  const double rhs = budget - csrr.footprint_load[static_cast<std::size_t>(e)];
  return rhs < 0.0 && rhs >= -1e-9 * std::max(1.0, budget) ? 0.0 : rhs;
}

}  // namespace

const char* to_string(Objective objective) {
  switch (objective) {
    case Objective::kOverflowSum: return "overflow";
    case Objective::kCongestion: return "congestion";
    case Objective::kMixed: return "mixed";
  }
  return "unknown";
}

Objective parse_objective(const std::string& text) {
  if (text == "overflow" || text == "overflow_sum") return Objective::kOverflowSum;
  if (text == "congestion") return Objective::kCongestion;
  if (text == "mixed") return Objective::kMixed;
  throw Error("unknown objective '" + text + "' (expected overflow, congestion or mixed)");
}

std::vector<OriginGroup> origin_groups(const Instance& instance, const FixedPaths& fixed) {
  std::map<NodeId, std::size_t> slot;
  for (const Commodity& c : instance.commodities) slot.emplace(c.origin, 0);
  std::vector<OriginGroup> groups;
  for (auto& [origin, index] : slot) {
    index = groups.size();
    groups.push_back(OriginGroup{origin, {}});
  }
  for (CommodityId k = 0; k < instance.commodity_count(); ++k) {
    if (fixed.empty() || !fixed[static_cast<std::size_t>(k)]) {
      groups[slot[instance.commodities[static_cast<std::size_t>(k)].origin]].members.push_back(k);
    }
  }
  return groups;
}

std::vector<double> fixed_loads(const Instance& instance, const FixedPaths& fixed) {
  std::vector<double> load(static_cast<std::size_t>(instance.graph.arc_count()), 0.0);
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    if (!fixed[k]) continue;
    for (ArcId e : *fixed[k]) load[static_cast<std::size_t>(e)] += instance.commodities[k].demand;
  }
  return load;
}

Relaxation build_relaxation(const Instance& instance, const FixedPaths& fixed,
                            const RelaxationConfig& config, std::optional<double> congestion_cap) {
  const Graph& g = instance.graph;
  const ArcId arcs = g.arc_count();
  if (!fixed.empty() && static_cast<CommodityId>(fixed.size()) != instance.commodity_count()) {
    throw Error("relaxation: fixed path list does not match the commodity count");
  }
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    if (!fixed[k]) continue;
    if (auto err = path_error(g, instance.commodities[k], *fixed[k])) {
      throw Error("relaxation: fixed commodity " + std::to_string(k) + ": " + *err);
    }
  }
  if (config.objective == Objective::kMixed && !congestion_cap) {
    throw Error("relaxation: mixed objective needs the first-stage congestion");
  }
  if (config.csrr) {
    if (!(config.csrr->delta_star > 0.0)) throw Error("relaxation: CSRR rows need delta_star > 0");
    if (static_cast<ArcId>(config.csrr->footprint_load.size()) != arcs) {
      throw Error("relaxation: CSRR footprint size does not match the arc count");
    }
  }

  Relaxation r;
  r.groups = origin_groups(instance, fixed);
  r.fixed_load = fixed_loads(instance, fixed);
  lp::LpProblem& p = r.problem;

  std::vector<std::vector<char>> reach;
  for (const OriginGroup& grp : r.groups) {
    reach.push_back(forward_reachable(g, {}, grp.origin, 0.0));
    std::vector<int> cols(static_cast<std::size_t>(arcs), -1);
    for (ArcId e = 0; e < arcs; ++e) {
      const Arc& a = g.arc(e);
      if (reach.back()[static_cast<std::size_t>(a.tail)] && a.head != grp.origin) {
        cols[static_cast<std::size_t>(e)] = p.add_column(0.0);
      }
    }
    r.flow_column.push_back(std::move(cols));
  }
  if (config.objective == Objective::kCongestion) {
    r.congestion_column = p.add_column(1.0);
  } else {
    for (ArcId e = 0; e < arcs; ++e) r.overflow_column.push_back(p.add_column(1.0));
  }

  std::vector<lp::Term> terms;
  std::vector<double> sink(static_cast<std::size_t>(g.node_count()));
  for (std::size_t gi = 0; gi < r.groups.size(); ++gi) {
    const OriginGroup& grp = r.groups[gi];
    const auto& cols = r.flow_column[gi];
    std::fill(sink.begin(), sink.end(), 0.0);
    for (CommodityId k : grp.members) {
      const Commodity& c = instance.commodities[static_cast<std::size_t>(k)];
      if (!reach[gi][static_cast<std::size_t>(c.destination)]) {
        throw Error("relaxation: commodity " + std::to_string(k) + " cannot reach its destination");
      }
      sink[static_cast<std::size_t>(c.destination)] += c.demand;
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v == grp.origin || !reach[gi][static_cast<std::size_t>(v)]) continue;
      terms.clear();
      for (ArcId e : g.out_arcs(v)) {
        if (cols[static_cast<std::size_t>(e)] >= 0) terms.push_back({cols[static_cast<std::size_t>(e)], 1.0});
      }
      for (ArcId e : g.in_arcs(v)) {
        if (cols[static_cast<std::size_t>(e)] >= 0) terms.push_back({cols[static_cast<std::size_t>(e)], -1.0});
      }
      p.add_row(terms, lp::RowSense::kEqual, -sink[static_cast<std::size_t>(v)]);
    }
  }

  auto arc_terms = [&](ArcId e) {
    terms.clear();
    for (const auto& cols : r.flow_column) {
      if (cols[static_cast<std::size_t>(e)] >= 0) terms.push_back({cols[static_cast<std::size_t>(e)], 1.0});
    }
  };
  for (ArcId e = 0; e < arcs; ++e) {
    const double c = g.arc(e).capacity;
    const double fl = r.fixed_load[static_cast<std::size_t>(e)];
    arc_terms(e);
    if (config.objective == Objective::kCongestion) {
      terms.push_back({r.congestion_column, -c});
      p.add_row(terms, lp::RowSense::kLessEqual, -fl);
    } else {
      terms.push_back({r.overflow_column[static_cast<std::size_t>(e)], -1.0});
      p.add_row(terms, lp::RowSense::kLessEqual, c - fl);
    }
  }
  if (config.objective == Objective::kMixed) {
    for (ArcId e = 0; e < arcs; ++e) {
      arc_terms(e);
      p.add_row(terms, lp::RowSense::kLessEqual,
                g.arc(e).capacity * *congestion_cap - r.fixed_load[static_cast<std::size_t>(e)]);
    }
  }
  if (config.csrr) {
    r.csrr_first_row = p.row_count();
    for (ArcId e = 0; e < arcs; ++e) {
      const double rhs = csrr_rhs(instance, *config.csrr, e);
      if (rhs < 0.0) {
        throw Error("relaxation: CSRR row of arc " + std::to_string(e) +
                    " has negative right side " + std::to_string(rhs) +
                    " (infeasible by construction)");
      }
      arc_terms(e);
      p.add_row(terms, lp::RowSense::kLessEqual, rhs);
    }
  }
  return r;
}

FractionalSolution solve_relaxation(const Instance& instance, const FixedPaths& fixed,
                                    const RelaxationConfig& config, const lp::LpBackend& backend,
                                    WarmStart* warm) {
  const Graph& g = instance.graph;
  const ArcId arcs = g.arc_count();
  FractionalSolution out;
  RelaxationConfig plain = config;
  plain.csrr.reset();
  std::optional<double> cap;
  if (config.objective == Objective::kMixed) {
    plain.objective = Objective::kCongestion;
    const Relaxation first = build_relaxation(instance, fixed, plain);
    const lp::LpSolution s = run(backend, first.problem, warm ? &warm->plain : nullptr, out, "congestion");
    out.first_stage_congestion = s.values[static_cast<std::size_t>(first.congestion_column)];
    cap = out.first_stage_congestion + kMixedSlack;
    plain.objective = Objective::kMixed;
  }

  Relaxation relax = build_relaxation(instance, fixed, plain, cap);
  lp::Basis* basis = nullptr;
  if (warm) basis = config.objective == Objective::kMixed ? &warm->mixed : &warm->plain;
  lp::LpSolution sol = run(backend, relax.problem, basis, out, to_string(config.objective));

  if (config.csrr) {
    const std::vector<double> load = free_loads(relax, sol, arcs);
    ArcId worst = -1;
    double worst_excess = kCsrrViolation;
    for (ArcId e = 0; e < arcs; ++e) {
      const double excess = load[static_cast<std::size_t>(e)] - csrr_rhs(instance, *config.csrr, e);
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = e;
      }
    }
    if (worst >= 0) {
      Relaxation restricted = build_relaxation(instance, fixed, config, cap);
      if (warm && warm->restricted.empty()) warm->restricted = sol.basis;
      try {
        sol = run(backend, restricted.problem, warm ? &warm->restricted : nullptr, out, "CSRR-restricted");
      } catch (const Error& e) {
        throw Error(std::string(e.what()) + "; arc " + std::to_string(worst) +
                    " exceeds its CSRR row by " + std::to_string(worst_excess) +
                    " in the unrestricted optimum");
      }
      relax = std::move(restricted);
      out.csrr_rows_added = true;
    }
  }

  out.groups = relax.groups;
  out.group_arc_flow.assign(relax.groups.size(), std::vector<double>(static_cast<std::size_t>(arcs), 0.0));
  std::vector<double> load = relax.fixed_load;
  for (std::size_t gi = 0; gi < relax.groups.size(); ++gi) {
    auto& flow = out.group_arc_flow[gi];
    for (ArcId e = 0; e < arcs; ++e) {
      const int c = relax.flow_column[gi][static_cast<std::size_t>(e)];
      if (c >= 0) flow[static_cast<std::size_t>(e)] = std::max(0.0, sol.values[static_cast<std::size_t>(c)]);
    }
    cancel_cycles(g, flow);
    for (ArcId e = 0; e < arcs; ++e) load[static_cast<std::size_t>(e)] += flow[static_cast<std::size_t>(e)];
  }
  out.overflow.resize(static_cast<std::size_t>(arcs));
  double overflow_sum = 0.0;
  for (ArcId e = 0; e < arcs; ++e) {
    const double c = g.arc(e).capacity;
    const double over = std::max(0.0, load[static_cast<std::size_t>(e)] - c);
    out.overflow[static_cast<std::size_t>(e)] = over;
    overflow_sum += over;
    out.congestion = std::max(out.congestion, load[static_cast<std::size_t>(e)] / c);
  }
  out.objective_value = config.objective == Objective::kCongestion ? out.congestion : overflow_sum;
  if (config.objective != Objective::kMixed) out.first_stage_congestion = out.congestion;

  if (config.csrr) {
    out.csrr_slack.resize(static_cast<std::size_t>(arcs));
    for (ArcId e = 0; e < arcs; ++e) {
      out.csrr_slack[static_cast<std::size_t>(e)] =
          csrr_rhs(instance, *config.csrr, e) -
          (load[static_cast<std::size_t>(e)] - relax.fixed_load[static_cast<std::size_t>(e)]);
    }
  }
  return out;
}

double granularity(const Instance& instance, double delta_star) {
  if (!(delta_star > 0.0)) throw Error("granularity: delta_star must be positive");
  return instance.max_demand() / (instance.graph.min_capacity() * delta_star);
}

}  // namespace uflow
