#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uflow/core.hpp"
#include "uflow/decompose.hpp"
#include "uflow/lp.hpp"
#include "uflow/lp_model.hpp"
#include "uflow/random.hpp"

namespace uflow {

enum class Variant { kRr, kRrSorted, kSrr, kSrrUnsorted, kCsrr };

const char* to_string(Variant variant);
// Accepts "rr", "rr-sorted", "srr", "srr-unsorted", "csrr" (underscores too).
Variant parse_variant(const std::string& text);

enum class OrderRule {
  kDecreasingDemand,  // ties by commodity index
  kInput,             // commodity index order
  kShuffled,          // uniform permutation drawn from the run seed
};

struct RoundingConfig {
  Variant variant = Variant::kSrr;
  std::optional<int> theta;             // default ceil(|V| / 4); ignored by rr variants
  double beta = 1.1;                    // csrr only
  Objective objective = Objective::kOverflowSum;  // csrr always uses congestion
  std::optional<OrderRule> order;       // default follows the variant
  std::uint64_t seed = 0;
  bool record_trace = false;
};

// One relaxation solve inside a run.
struct SolveRecord {
  int fixed_count = 0;                 // commodities fixed before this solve
  double objective_value = 0.0;
  std::vector<double> free_load;       // per arc, flow of the free commodities
  std::vector<CommodityId> split;      // free commodities with >= 2 support paths
  bool csrr_rows_added = false;
  std::vector<double> csrr_slack;      // per arc, csrr only
};

struct RoundingResult {
  PathAssignment assignment;
  Metrics metrics;
  int lp_solves = 0;
  int lp_iterations = 0;
  int split_fixed = 0;                 // commodities fixed while split
  double delta_star = 0.0;             // congestion of the first relaxation
  std::vector<CommodityId> order;
  std::vector<SolveRecord> trace;      // filled when record_trace is set
};

int default_theta(const Instance& instance);

// The commodity processing order for a rule; kShuffled draws from `rng`.
std::vector<CommodityId> commodity_order(const Instance& instance, OrderRule rule, Rng& rng);

// Samples one support path with probability equal to its weight, consuming
// exactly one uniform draw. Zero-weight paths are never chosen.
const Path& round_once(std::span<const WeightedPath> distribution, Rng& rng);

// One relaxation, one decomposition, independent rounding of every commodity.
RoundingResult run_rr(const Instance& instance, const RoundingConfig& config,
                      const lp::LpBackend& backend = lp::default_backend());

// Sequential rounding: commodities are fixed one at a time in order, and the
// relaxation is re-solved (and re-decomposed) after theta commodities that
// were split in the current solution have been fixed.
RoundingResult run_srr(const Instance& instance, const RoundingConfig& config,
                       const lp::LpBackend& backend = lp::default_backend());

// Sequential rounding under the congestion objective with the CSRR rows
// (free load <= beta * c_e * delta_star - fixed footprints) in every re-solve.
RoundingResult run_csrr(const Instance& instance, const RoundingConfig& config,
                        const lp::LpBackend& backend = lp::default_backend());

// Dispatches on config.variant.
RoundingResult run_rounding(const Instance& instance, const RoundingConfig& config,
                            const lp::LpBackend& backend = lp::default_backend());

}  // namespace uflow
