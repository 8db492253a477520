#pragma once

// Independent checks for the simplex: brute-force vertex enumeration over
// small bounded LPs, primal violation, and a dual-feasibility certificate.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "uflow/lp.hpp"
#include "uflow/random.hpp"

namespace uflow::lp::testing_oracle {

// Random LP with 1..6 boxed variables and 1..8 rows (some equalities). Right
// sides come from a random box point plus slack, except for a share of rows
// with arbitrary right sides, so some instances are infeasible.
inline LpProblem random_small_lp(Rng& rng) {
  const int n = static_cast<int>(rng.uniform_int(1, 6));
  const int m = static_cast<int>(rng.uniform_int(1, 8));
  LpProblem p;
  std::vector<double> point(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double lo = static_cast<double>(rng.uniform_int(-3, 0));
    const double up = lo + static_cast<double>(rng.uniform_int(0, 6));
    p.add_column(static_cast<double>(rng.uniform_int(-5, 5)), lo, up);
    point[static_cast<std::size_t>(j)] = lo + (up - lo) * rng.uniform01();
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform01() < 0.35) continue;
      const double a = static_cast<double>(rng.uniform_int(-4, 4));
      if (a == 0.0) continue;
      terms.push_back({j, a});
      act += a * point[static_cast<std::size_t>(j)];
    }
    const bool equality = rng.uniform01() < 0.2;
    double rhs = std::round(act) + (equality ? 0.0 : static_cast<double>(rng.uniform_int(0, 3)));
    if (equality) rhs = act;
    if (rng.uniform01() < 0.1) rhs = static_cast<double>(rng.uniform_int(-12, 2));
    p.add_row(terms, equality ? RowSense::kEqual : RowSense::kLessEqual, rhs);
  }
  return p;
}

inline double max_violation(const LpProblem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < p.column_count(); ++j) {
    worst = std::max({worst, p.lower(j) - x[static_cast<std::size_t>(j)], x[static_cast<std::size_t>(j)] - p.upper(j)});
  }
  const auto act = p.activity(x);
  for (int i = 0; i < p.row_count(); ++i) {
    const double r = act[static_cast<std::size_t>(i)] - p.rhs(i);
    worst = std::max(worst, p.sense(i) == RowSense::kEqual ? std::abs(r) : r);
  }
  return worst;
}

// Enumerates every choice of n tight constraints among rows and finite
// bounds, keeps the feasible intersection points and returns the best
// objective; nullopt when no vertex is feasible. Requires all variables boxed.
inline std::optional<double> enumerate_vertices(const LpProblem& p) {
  const int n = p.column_count();
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> values;
  for (int i = 0; i < p.row_count(); ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const Term& t : p.row(i)) a[t.column] += t.value;
    normals.push_back(a);
    values.push_back(p.rhs(i));
  }
  for (int j = 0; j < n; ++j) {
    for (double b : {p.lower(j), p.upper(j)}) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[j] = 1.0;
      normals.push_back(a);
      values.push_back(b);
    }
  }
  const int total = static_cast<int>(normals.size());
  std::optional<double> best;
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) pick[static_cast<std::size_t>(j)] = j;
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  while (true) {
    for (int r = 0; r < n; ++r) {
      A.row(r) = normals[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].transpose();
      b[r] = values[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() == n) {
      const Eigen::VectorXd x = lu.solve(b);
      std::vector<double> xv(x.data(), x.data() + n);
      if (max_violation(p, xv) <= 1e-7) {
        const double obj = p.objective_value(xv);
        if (!best || obj < *best) best = obj;
      }
    }
    int k = n - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == total - n + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int r = k + 1; r < n; ++r) pick[static_cast<std::size_t>(r)] = pick[static_cast<std::size_t>(r) - 1] + 1;
  }
  return best;
}

// Largest violation of the optimality conditions certified by the returned
// duals: reduced-cost signs for columns and row logicals, and the
// primal-dual objective gap.
inline double dual_gap(const LpProblem& p, const LpSolution& s) {
  const double tol = 1e-7;
  std::vector<double> d(static_cast<std::size_t>(p.column_count()));
  for (int j = 0; j < p.column_count(); ++j) d[static_cast<std::size_t>(j)] = p.cost(j);
  for (int i = 0; i < p.row_count(); ++i) {
    for (const Term& t : p.row(i)) d[static_cast<std::size_t>(t.column)] -= s.duals[static_cast<std::size_t>(i)] * t.value;
  }
  double worst = 0.0;
  double dual_obj = 0.0;
  for (int i = 0; i < p.row_count(); ++i) {
    const double y = s.duals[static_cast<std::size_t>(i)];
    if (p.sense(i) == RowSense::kLessEqual) worst = std::max(worst, y);
    dual_obj += y * p.rhs(i);
  }
  for (int j = 0; j < p.column_count(); ++j) {
    const double x = s.values[static_cast<std::size_t>(j)];
    const double dj = d[static_cast<std::size_t>(j)];
    const bool at_lower = std::abs(x - p.lower(j)) <= tol;
    const bool at_upper = std::abs(x - p.upper(j)) <= tol;
    if (!at_lower) worst = std::max(worst, dj);
    if (!at_upper) worst = std::max(worst, -dj);
    if (dj > 0.0 && std::isfinite(p.lower(j))) dual_obj += dj * p.lower(j);
    if (dj < 0.0 && std::isfinite(p.upper(j))) dual_obj += dj * p.upper(j);
  }
  return std::max(worst, std::abs(dual_obj - s.objective) / (1.0 + std::abs(s.objective)));
}

}  // namespace uflow::lp::testing_oracle
