#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace uflow::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { kLessEqual, kEqual };

struct Term {
  int column = 0;
  double value = 0.0;
};

// min c'x  subject to  A_i x (<= | =) b_i,  lower <= x <= upper.
// Rows are stored row-wise in insertion order; ">=" rows are written by the
// caller as negated "<=" rows.
class LpProblem {
 public:
  int add_column(double cost, double lower = 0.0, double upper = kInfinity);
  int add_row(std::span<const Term> terms, RowSense sense, double rhs);
  int add_row(std::initializer_list<Term> terms, RowSense sense, double rhs) {
    return add_row(std::span<const Term>(terms.begin(), terms.size()), sense, rhs);
  }

  int column_count() const { return static_cast<int>(cost_.size()); }
  int row_count() const { return static_cast<int>(rhs_.size()); }
  std::size_t nonzero_count() const { return terms_.size(); }

  double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
  double lower(int j) const { return lower_[static_cast<std::size_t>(j)]; }
  double upper(int j) const { return upper_[static_cast<std::size_t>(j)]; }
  double rhs(int i) const { return rhs_[static_cast<std::size_t>(i)]; }
  RowSense sense(int i) const { return sense_[static_cast<std::size_t>(i)]; }
  std::span<const Term> row(int i) const;

  void set_cost(int j, double c) { cost_[static_cast<std::size_t>(j)] = c; }
  void set_bounds(int j, double lower, double upper);
  void set_rhs(int i, double b) { rhs_[static_cast<std::size_t>(i)] = b; }

  // Row activities A x.
  std::vector<double> activity(std::span<const double> x) const;
  double objective_value(std::span<const double> x) const;

  // Throws uflow::Error on non-finite data, lower > upper, or a term that
  // references a missing column.
  void validate() const;

 private:
  std::vector<double> cost_, lower_, upper_;
  std::vector<double> rhs_;
  std::vector<RowSense> sense_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Term> terms_;
};

// Plain-text dump for cross-checking with external solvers:
//
//   lp <rows> <columns> <nonzeros>
//   c <j> <cost> <lower> <upper>          one per column ("inf"/"-inf" bounds)
//   r <i> <L|E> <rhs> <k> <j1> <a1> ...   one per row, k terms
void export_text(std::ostream& out, const LpProblem& problem);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
const char* to_string(LpStatus status);

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

// Simplex basis: one status per structural column and one per row logical
// (the slack of row i). Exactly row_count entries are kBasic.
struct Basis {
  std::vector<VarStatus> columns;
  std::vector<VarStatus> rows;
  bool empty() const { return columns.empty() && rows.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;  // per structural column
  std::vector<double> duals;   // per row, sign convention of min c'x with y'A <= c
  double objective = 0.0;
  int iterations = 0;
  Basis basis;
};

struct SolveOptions {
  // Optional starting basis; ignored when its dimensions do not match.
  const Basis* warm_start = nullptr;
  int max_iterations = 1'000'000;
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  // Pivots smaller than this are a numerical breakdown.
  double pivot_tolerance = 1e-11;
  int refactor_interval = 100;
};

// Bounded-variable primal simplex (phase 1 minimizes the sum of bound
// infeasibilities of basic variables, phase 2 the objective). Dantzig pricing
// with a switch to Bland's rule while the objective stalls on degenerate
// pivots; Harris two-pass ratio test. Deterministic for a given problem and
// options.
LpSolution solve(const LpProblem& problem, const SolveOptions& options = {});

// Extension point for alternative relaxation solvers.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual LpSolution solve(const LpProblem& problem, const SolveOptions& options) const = 0;
  virtual std::string name() const = 0;
};

class SimplexBackend final : public LpBackend {
 public:
  LpSolution solve(const LpProblem& problem, const SolveOptions& options) const override {
    return lp::solve(problem, options);
  }
  std::string name() const override { return "simplex"; }
};

const LpBackend& default_backend();

}  // namespace uflow::lp
