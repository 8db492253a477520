#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uflow/annealing.hpp"
#include "uflow/core.hpp"
#include "uflow/rounding.hpp"

namespace uflow::bench {

// ---------------------------------------------------------------- statistics

struct Summary {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;                  // sample standard deviation, 0 when n < 2
  std::optional<double> ci_half;    // 1.96 sd / sqrt(n); absent when n < 2
};

Summary summarize(std::span<const double> values);

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  double p_less = 0.5;     // alternative: mean(a) < mean(b)
  double p_greater = 0.5;  // alternative: mean(a) > mean(b)
};

// Student t on the differences a[i] - b[i]. Throws Error on size mismatch or
// fewer than two pairs. Zero spread gives t = 0 (equal means) or +-inf.
TTest paired_t_test(std::span<const double> a, std::span<const double> b);
// Unequal-variance two-sample test with Welch-Satterthwaite degrees of freedom.
TTest welch_t_test(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------- specs

enum class Dataset {
  kGridSizeSweep,    // group = grid n
  kRandomSizeSweep,  // group = node count
  kCommoditySweep,   // group = (capacity, max demand) on a fixed grid
  kThetaSweep,       // group = theta for every rounding algorithm
  kOrderStudy,       // group = grid n; sorted vs unsorted variants
  kObjectiveStudy,   // group = relaxation objective for every rounding algorithm
};

const char* to_string(Dataset dataset);
Dataset parse_dataset(const std::string& text);

// One algorithm column. `label` is the text from the spec, e.g. "srr" or
// "sa(iterations_scale=3)".
struct AlgorithmSpec {
  std::string label;
  bool annealing = false;
  RoundingConfig rounding;           // variant, theta, beta, objective, order
  double sa_iterations_scale = 1.0;  // multiplies the default budget
  std::optional<std::int64_t> sa_iterations;
  int k_paths = 10;
};

AlgorithmSpec parse_algorithm(const std::string& text);

// Theta given per group: a number or one of "v/4", "v", "k" evaluated on
// each instance.
struct ThetaRule {
  enum class Kind { kValue, kQuarterNodes, kNodes, kCommodities } kind = Kind::kValue;
  int value = 1;
  std::string label;
  int resolve(const Instance& instance) const;
};

ThetaRule parse_theta_rule(const std::string& text);

struct CommodityScale {
  double capacity = 100.0;
  int max_demand = 10;
};

struct ExperimentSpec {
  std::string name;  // output file stem; defaults to the dataset name
  Dataset dataset = Dataset::kGridSizeSweep;
  std::vector<int> sizes;                 // size sweeps and order study
  std::vector<CommodityScale> scales;     // commodity sweep
  std::vector<ThetaRule> thetas;          // theta sweep
  std::vector<Objective> objectives;      // objective study
  int grid_n = 10;                        // fixed grid for the other datasets
  double capacity = 1e4;
  int max_demand = 1500;
  double average_degree = 5.0;
  double origin_probability = 0.1;
  int instances_per_group = 30;
  int seeds = 1;                          // algorithm seeds per instance
  std::uint64_t base_seed = 0;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::filesystem::path> instance_files;  // replaces generation
};

// key = value lines; '#' starts a comment; lists are comma separated. See
// the README for the keys. Unset keys take the dataset defaults.
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec load_spec(const std::filesystem::path& file);

// Throws Error naming the first problem.
void validate_spec(const ExperimentSpec& spec);

// ---------------------------------------------------------------- runs

struct Group {
  std::string label;  // e.g. "n=6", "theta=v/4", "objective=mixed"
  std::optional<double> value;  // numeric parameter when there is one
};

struct ResultRow {
  int group = 0;
  int instance = 0;
  std::uint64_t instance_seed = 0;
  int nodes = 0;
  int arcs = 0;
  int commodities = 0;
  double total_demand = 0.0;
  int algorithm = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  double overflow_sum = 0.0;
  double overflow_ratio = 0.0;  // overflow_sum / total_demand
  double congestion = 0.0;
  double wall_seconds = 0.0;
  int lp_solves = 0;
  std::string error;            // empty on success
};

struct ResultTable {
  ExperimentSpec spec;
  std::vector<Group> groups;
  std::vector<ResultRow> rows;  // ordered by (group, instance, algorithm, seed)
};

struct RunOptions {
  int jobs = 1;
  // Called after each finished run with (done, total); may be empty.
  std::function<void(int, int)> progress;
};

// Instance i of every group is generated from seed base_seed + i, so groups
// that do not change the generator (theta, objective) share instances.
// Run seeds are mix_seed(instance_seed, seed_index).
ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// Rows of one (group, algorithm) cell without errors, ordered by
// (instance, seed).
std::vector<const ResultRow*> cell(const ResultTable& table, int group, int algorithm);

enum class Metric { kOverflowRatio, kCongestion, kWallSeconds, kLpSolves };
const char* to_string(Metric metric);
double metric_value(const ResultRow& row, Metric metric);

// Metric values of two cells matched on (instance, seed); runs that failed
// in either cell are dropped.
struct Paired {
  std::vector<double> a, b;
};
Paired paired_values(const ResultTable& table, int group_a, int algorithm_a, int group_b,
                     int algorithm_b, Metric metric);

// ---------------------------------------------------------------- reports

// Writes <name>_results.csv, <name>_summary.csv, <name>_tests.csv and one
// <name>_<metric>.svg per metric into `dir`, creating it. Returns the files.
std::vector<std::filesystem::path> emit_report(const ResultTable& table,
                                               const std::filesystem::path& dir);

void write_results_csv(std::ostream& out, const ResultTable& table);
void write_summary_csv(std::ostream& out, const ResultTable& table);
void write_tests_csv(std::ostream& out, const ResultTable& table);
void write_plot_svg(std::ostream& out, const ResultTable& table, Metric metric);

// The output directory: `requested` when given, else $UFLOW_OUT_DIR, else
// "results".
std::filesystem::path output_dir(const std::optional<std::filesystem::path>& requested);

}  // namespace uflow::bench
