#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uflow/core.hpp"
#include "uflow/lp.hpp"

namespace uflow {

// Left side of (1 + a) ln(1 + a) - a = B.
double alpha_equation(double alpha);

// Root of alpha_equation(alpha) = B, bisected to machine precision on
// [sqrt(B), B + 2], which brackets it for every B > 0. Returns 0 for B <= 0.
double solve_alpha(double b);

struct BoundQuery {
  std::int64_t arc_count = 1;
  double epsilon = 0.1;           // failure probability, in (0, 1)
  double gamma = 1.0;             // granularity D_max / (c_min delta*)
  std::optional<double> beta;     // relaxed CSRR rows, >= 1
};

struct BoundReport {
  double b = 0.0;       // gamma ln(|E| / epsilon), divided by beta when given
  double alpha = 0.0;
  double factor = 0.0;  // congestion guarantee over delta*: (1 + alpha), times beta when given
};

// Throws Error on a query outside its domain.
BoundReport approximation_bound(const BoundQuery& query);

// [e^a / (1 + a)^(1 + a)]^(c_e delta* / D_max), clamped to [0, 1]. The
// exponent divides by D_max because the bound is stated for demands scaled
// so that the largest is 1.
double lemma2_bound(double alpha, double capacity, double delta_star, double d_max);

struct TailConfig {
  std::vector<double> alphas{1.0};
  int runs = 1000;
  std::uint64_t seed = 0;
  double beta = 1.0;    // CSRR relaxation; the bound is proven for 1
  std::optional<int> theta;
  int jobs = 1;
};

struct TailArc {
  ArcId arc = 0;
  double threshold = 0.0;  // (1 + alpha) c_e delta*, scaled units
  int exceedances = 0;
  double frequency = 0.0;
  double bound = 0.0;
};

struct TailReport {
  double alpha = 0.0;
  std::vector<TailArc> arcs;
};

struct TailResult {
  double d_max = 0.0;
  double delta_star = 0.0;  // of the scaled instance (equal to the unscaled one)
  int runs_requested = 0;
  int runs_completed = 0;
  bool complete = true;     // false when a run failed; counts cover completed runs
  std::string error;
  std::vector<TailReport> reports;  // one per alpha, in config order
};

// Runs CSRR `runs` times on a copy of the instance with demands divided by
// D_max and counts, per arc and alpha, the runs whose final load reaches
// (1 + alpha) c_e delta*. Run r uses seed mix_seed(config.seed, r).
TailResult monte_carlo_tail(const Instance& instance, const TailConfig& config,
                            const lp::LpBackend& backend = lp::default_backend());

}  // namespace uflow
