#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uflow/core.hpp"
#include "uflow/lp.hpp"

namespace uflow {

enum class Objective {
  kOverflowSum,  // min sum_e max(0, load_e - c_e)
  kCongestion,   // min max_e load_e / c_e
  kMixed,        // least overflow sum among minimum-congestion solutions
};

const char* to_string(Objective objective);
Objective parse_objective(const std::string& text);

// Extra capacity rows that keep the free flow on every arc below
// beta * c_e * delta_star minus the fractional load the fixed commodities
// carried when they were fixed.
struct CsrrRows {
  double delta_star = 0.0;
  double beta = 1.0;
  std::vector<double> footprint_load;  // per arc, sum over fixed k of fhat_ek * D_k
};

struct RelaxationConfig {
  Objective objective = Objective::kOverflowSum;
  std::optional<CsrrRows> csrr;
};

// Per commodity: the path it is fixed to, or nullopt while it is free.
using FixedPaths = std::vector<std::optional<Path>>;

// Commodities sharing an origin are aggregated into one flow. Groups are
// formed from all commodities, so the LP keeps its shape as commodities get
// fixed; `members` lists the free ones.
struct OriginGroup {
  NodeId origin = 0;
  std::vector<CommodityId> members;
};

std::vector<OriginGroup> origin_groups(const Instance& instance, const FixedPaths& fixed);

// Column layout of a built relaxation.
struct Relaxation {
  lp::LpProblem problem;
  std::vector<OriginGroup> groups;
  // flow_column[g][e]: LP column of group g's flow on arc e, or -1 when the
  // arc is not reachable from the group's origin.
  std::vector<std::vector<int>> flow_column;
  std::vector<int> overflow_column;  // per arc (overflow objective), else empty
  int congestion_column = -1;        // congestion objective only
  std::vector<double> fixed_load;    // per arc
  int csrr_first_row = -1;           // first CSRR row, one per arc, or -1
};

// Arc-node relaxation with one flow per origin group. Conservation is one
// equality row per (group, node) with the group's net free demand as right
// side; the origin's row is implied and omitted. Capacity rows per arc:
//   overflow:    sum_g f_ge - overflow_e <= c_e - fixedload_e
//   congestion:  sum_g f_ge - c_e * delta <= -fixedload_e
// The mixed objective is built as its second stage: the overflow form plus
// sum_g f_ge <= c_e * congestion_cap - fixedload_e, with the cap passed in.
// Throws Error naming the arc when a CSRR row has a negative right side.
Relaxation build_relaxation(const Instance& instance, const FixedPaths& fixed,
                            const RelaxationConfig& config,
                            std::optional<double> congestion_cap = std::nullopt);

struct FractionalSolution {
  std::vector<OriginGroup> groups;
  std::vector<std::vector<double>> group_arc_flow;  // [group][arc]
  std::vector<double> overflow;                     // per arc, fixed load included
  double congestion = 0.0;                          // fixed load included
  double objective_value = 0.0;
  double first_stage_congestion = 0.0;              // mixed objective only
  int lp_solves = 0;
  int lp_iterations = 0;
  bool csrr_rows_added = false;
  std::vector<double> csrr_slack;                   // per arc, when csrr configured
};

// Carries bases between successive solves of the same instance.
struct WarmStart {
  lp::Basis plain, restricted, mixed;
};

// Solves the relaxation and maps the optimum back to per-group arc flows.
// Circulations are cancelled from every group flow before the overflow and
// congestion values are recomputed. With CSRR rows configured the LP is first
// solved without them and re-solved with them only if the optimum violates
// one. Throws Error if the LP is not optimal.
FractionalSolution solve_relaxation(const Instance& instance, const FixedPaths& fixed,
                                    const RelaxationConfig& config,
                                    const lp::LpBackend& backend = lp::default_backend(),
                                    WarmStart* warm = nullptr);

// max_k D_k / (min_e c_e * delta_star).
double granularity(const Instance& instance, double delta_star);

// Per-arc load of the fixed commodities.
std::vector<double> fixed_loads(const Instance& instance, const FixedPaths& fixed);

}  // namespace uflow
