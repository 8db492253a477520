#include <cmath>
#include <ostream>

#include "uflow/core.hpp"
#include "uflow/instance_io.hpp"
#include "uflow/lp.hpp"

namespace uflow::lp {

int LpProblem::add_column(double cost, double lower, double upper) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return column_count() - 1;
}

int LpProblem::add_row(std::span<const Term> terms, RowSense sense, double rhs) {
  terms_.insert(terms_.end(), terms.begin(), terms.end());
  row_start_.push_back(terms_.size());
  rhs_.push_back(rhs);
  sense_.push_back(sense);
  return row_count() - 1;
}

std::span<const Term> LpProblem::row(int i) const {
  const std::size_t b = row_start_[static_cast<std::size_t>(i)];
  const std::size_t e = row_start_[static_cast<std::size_t>(i) + 1];
  return std::span<const Term>(terms_).subspan(b, e - b);
}

void LpProblem::set_bounds(int j, double lower, double upper) {
  lower_[static_cast<std::size_t>(j)] = lower;
  upper_[static_cast<std::size_t>(j)] = upper;
}

std::vector<double> LpProblem::activity(std::span<const double> x) const {
  std::vector<double> out(static_cast<std::size_t>(row_count()), 0.0);
  for (int i = 0; i < row_count(); ++i) {
    double s = 0.0;
    for (const Term& t : row(i)) s += t.value * x[static_cast<std::size_t>(t.column)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

double LpProblem::objective_value(std::span<const double> x) const {
  double s = 0.0;
  for (int j = 0; j < column_count(); ++j) s += cost(j) * x[static_cast<std::size_t>(j)];
  return s;
}

void LpProblem::validate() const {
  for (int j = 0; j < column_count(); ++j) {
    if (!std::isfinite(cost(j))) throw Error("lp: column " + std::to_string(j) + " has non-finite cost");
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) ||
        lower(j) == kInfinity || upper(j) == -kInfinity) {
      throw Error("lp: column " + std::to_string(j) + " has inconsistent bounds");
    }
  }
  for (int i = 0; i < row_count(); ++i) {
    if (!std::isfinite(rhs(i))) throw Error("lp: row " + std::to_string(i) + " has non-finite rhs");
    for (const Term& t : row(i)) {
      if (t.column < 0 || t.column >= column_count()) {
        throw Error("lp: row " + std::to_string(i) + " references missing column " +
                    std::to_string(t.column));
      }
      if (!std::isfinite(t.value)) {
        throw Error("lp: row " + std::to_string(i) + " has a non-finite coefficient");
      }
    }
  }
}

void export_text(std::ostream& out, const LpProblem& problem) {
  auto bound = [](double v) -> std::string {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    return format_number(v);
  };
  out << "lp " << problem.row_count() << ' ' << problem.column_count() << ' '
      << problem.nonzero_count() << '\n';
  for (int j = 0; j < problem.column_count(); ++j) {
    out << "c " << j << ' ' << format_number(problem.cost(j)) << ' ' << bound(problem.lower(j))
        << ' ' << bound(problem.upper(j)) << '\n';
  }
  for (int i = 0; i < problem.row_count(); ++i) {
    const auto terms = problem.row(i);
    out << "r " << i << ' ' << (problem.sense(i) == RowSense::kEqual ? 'E' : 'L') << ' '
        << format_number(problem.rhs(i)) << ' ' << terms.size();
    for (const Term& t : terms) out << ' ' << t.column << ' ' << format_number(t.value);
    out << '\n';
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

const LpBackend& default_backend() {
  static const SimplexBackend backend;
  return backend;
}

}  // namespace uflow::lp
