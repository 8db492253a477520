#include "uflow/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "uflow/random.hpp"
#include "uflow/rounding.hpp"

namespace uflow {

namespace {

// Loads within this relative distance below a threshold count as reaching
// it, so that an exact tie is not lost to LP roundoff in delta*.
constexpr double kThresholdSlack = 1e-9;

}  // namespace

double alpha_equation(double alpha) { return (1.0 + alpha) * std::log1p(alpha) - alpha; }

double solve_alpha(double b) {
  if (!(b > 0.0)) return 0.0;
  double lo = std::sqrt(b);
  double hi = b + 2.0;
  // The bracket is valid only up to roundoff near its ends; widen if needed.
  while (lo > 0.0 && alpha_equation(lo) > b) lo *= 0.5;
  while (alpha_equation(hi) < b) hi *= 2.0;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (alpha_equation(mid) < b ? lo : hi) = mid;
  }
  return std::abs(alpha_equation(lo) - b) <= std::abs(alpha_equation(hi) - b) ? lo : hi;
}

BoundReport approximation_bound(const BoundQuery& q) {
  if (q.arc_count < 1) throw Error("bound: arc count must be >= 1");
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0)) throw Error("bound: epsilon must lie in (0, 1)");
  if (!(q.gamma > 0.0)) throw Error("bound: gamma must be > 0");
  if (q.beta && !(*q.beta >= 1.0)) throw Error("bound: beta must be >= 1");
  BoundReport r;
  r.b = q.gamma * std::log(static_cast<double>(q.arc_count) / q.epsilon) / q.beta.value_or(1.0);
  r.alpha = solve_alpha(r.b);
  r.factor = (1.0 + r.alpha) * q.beta.value_or(1.0);
  return r;
}

double lemma2_bound(double alpha, double capacity, double delta_star, double d_max) {
  if (!(alpha >= 0.0)) throw Error("lemma2_bound: alpha must be >= 0");
  if (!(d_max > 0.0)) throw Error("lemma2_bound: D_max must be > 0");
  const double exponent = capacity * delta_star / d_max;
  if (!(exponent > 0.0)) throw Error("lemma2_bound: c_e * delta* must be > 0");
  // log of the base is -alpha_equation(alpha) <= 0.
  return std::clamp(std::exp(-alpha_equation(alpha) * exponent), 0.0, 1.0);
}

TailResult monte_carlo_tail(const Instance& instance, const TailConfig& config,
                            const lp::LpBackend& backend) {
  if (config.runs < 1) throw Error("tailcheck: runs must be >= 1");
  if (config.alphas.empty()) throw Error("tailcheck: no alpha given");
  for (double a : config.alphas) {
    if (!(a > 0.0)) throw Error("tailcheck: alpha must be > 0");
  }
  TailResult out;
  out.d_max = instance.max_demand();
  if (!(out.d_max > 0.0)) throw Error("tailcheck: instance has no positive demand");
  Instance scaled = instance;
  for (Commodity& c : scaled.commodities) c.demand /= out.d_max;

  const FractionalSolution first = solve_relaxation(scaled, {}, {Objective::kCongestion, {}}, backend);
  out.delta_star = first.congestion;
  out.runs_requested = config.runs;

  const Graph& g = scaled.graph;
  const auto arcs = static_cast<std::size_t>(g.arc_count());
  const std::size_t na = config.alphas.size();
  std::vector<double> threshold(na * arcs);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t e = 0; e < arcs; ++e) {
      threshold[a * arcs + e] = (1.0 + config.alphas[a]) * g.arc(static_cast<ArcId>(e)).capacity * out.delta_star;
    }
  }

  std::vector<int> counts(na * arcs, 0);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex merge;
  auto worker = [&] {
    std::vector<int> local(na * arcs, 0);
    int done = 0;
    for (int r; !failed && (r = next++) < config.runs;) {
      try {
        RoundingConfig rc;
        rc.variant = Variant::kCsrr;
        rc.theta = config.theta;
        rc.beta = config.beta;
        rc.seed = mix_seed(config.seed, static_cast<std::uint64_t>(r));
        const RoundingResult res = run_csrr(scaled, rc, backend);
        for (std::size_t i = 0; i < na * arcs; ++i) {
          local[i] += res.metrics.arc_load[i % arcs] >= threshold[i] * (1.0 - kThresholdSlack);
        }
        ++done;
      } catch (const std::exception& ex) {
        std::lock_guard lock(merge);
        if (!failed.exchange(true)) out.error = "run " + std::to_string(r) + ": " + ex.what();
      }
    }
    std::lock_guard lock(merge);
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    out.runs_completed += done;
  };
  const int jobs = std::clamp(config.jobs, 1, config.runs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  out.complete = !failed;

  for (std::size_t a = 0; a < na; ++a) {
    TailReport rep;
    rep.alpha = config.alphas[a];
    for (std::size_t e = 0; e < arcs; ++e) {
      TailArc t;
      t.arc = static_cast<ArcId>(e);
      t.threshold = threshold[a * arcs + e];
      t.exceedances = counts[a * arcs + e];
      t.frequency = out.runs_completed > 0 ? static_cast<double>(t.exceedances) / out.runs_completed : 0.0;
      t.bound = lemma2_bound(rep.alpha, g.arc(t.arc).capacity, out.delta_star, 1.0);
      rep.arcs.push_back(t);
    }
    out.reports.push_back(std::move(rep));
  }
  return out;
}

}  // namespace uflow
