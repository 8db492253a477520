// Bounded-variable revised primal simplex.
//
// Every row i gets a logical column e_i with bounds [0, inf) for "<=" rows and
// [0, 0] for "=" rows, so the constraint system is A x + s = b. The basis is
// factorized with a sparse LU and updated in product form (one eta column per
// pivot) between refactorizations.
//
// Feasibility is reached with a composite phase 1: basic variables outside
// their bounds get cost -1/+1 and the simplex minimizes the total violation.
// Any basis can therefore start the method, which is what makes warm starts
// after right-hand-side changes cheap.

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "uflow/core.hpp"
#include "uflow/lp.hpp"

namespace uflow::lp {

namespace {

// Ratio-test entries below this magnitude are treated as zero.
constexpr double kRatioZero = 1e-9;
constexpr int kDegenerateStreakForBland = 50;

struct Eta {
  int position = 0;
  double pivot = 1.0;
  std::vector<int> index;
  std::vector<double> value;
};

class Breakdown {};

class Simplex {
 public:
  Simplex(const LpProblem& problem, const SolveOptions& options);

  LpSolution run();

 private:
  enum class Phase { kFeasibility, kOptimality };

  bool is_logical(int j) const { return j >= n_; }

  template <typename F>
  void for_column(int j, F&& f) const {
    if (is_logical(j)) {
      f(j - n_, 1.0);
      return;
    }
    for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k) {
      f(col_row_[static_cast<std::size_t>(k)], col_val_[static_cast<std::size_t>(k)]);
    }
  }

  double nonbasic_value(int j, VarStatus s) const;
  void cold_basis();
  bool warm_basis(const Basis& basis);
  bool factorize();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void recompute_primal();
  double infeasibility(int j) const;
  double total_infeasibility() const;
  void compute_duals(Phase phase, Eigen::VectorXd& y) const;
  double reduced_cost(int j, Phase phase, const Eigen::VectorXd& y) const;

  struct Choice {
    int column = -1;
    double direction = 0.0;
  };
  Choice price(Phase phase, const Eigen::VectorXd& y) const;

  struct Step {
    int position = -1;       // leaving basis position, -1 for a bound flip
    double length = 0.0;
    bool leaves_at_upper = false;
    bool unbounded = false;
  };
  Step ratio_test(Phase phase, const Eigen::VectorXd& alpha, int entering, double direction) const;
  void pivot(int entering, double direction, const Eigen::VectorXd& alpha, const Step& step);

  LpSolution finish(LpStatus status);

  const LpProblem& problem_;
  const SolveOptions& options_;
  int m_ = 0;
  int n_ = 0;
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_, lo_, up_;
  std::vector<double> b_;

  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<int> position_;
  std::vector<VarStatus> status_;

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  int iterations_ = 0;
  bool bland_ = false;
  int degenerate_streak_ = 0;
};

Simplex::Simplex(const LpProblem& problem, const SolveOptions& options)
    : problem_(problem), options_(options), m_(problem.row_count()), n_(problem.column_count()) {
  const auto total = static_cast<std::size_t>(n_ + m_);
  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  up_.assign(total, kInfinity);
  for (int j = 0; j < n_; ++j) {
    cost_[static_cast<std::size_t>(j)] = problem.cost(j);
    lo_[static_cast<std::size_t>(j)] = problem.lower(j);
    up_[static_cast<std::size_t>(j)] = problem.upper(j);
  }
  b_.resize(static_cast<std::size_t>(m_));
  std::vector<int> count(static_cast<std::size_t>(n_) + 1, 0);
  for (int i = 0; i < m_; ++i) {
    b_[static_cast<std::size_t>(i)] = problem.rhs(i);
    if (problem.sense(i) == RowSense::kEqual) up_[static_cast<std::size_t>(n_ + i)] = 0.0;
    for (const Term& t : problem.row(i)) ++count[static_cast<std::size_t>(t.column) + 1];
  }
  for (int j = 0; j < n_; ++j) count[static_cast<std::size_t>(j) + 1] += count[static_cast<std::size_t>(j)];
  col_start_ = count;
  col_row_.resize(problem.nonzero_count());
  col_val_.resize(problem.nonzero_count());
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : problem.row(i)) {
      const auto slot = static_cast<std::size_t>(count[static_cast<std::size_t>(t.column)]++);
      col_row_[slot] = i;
      col_val_[slot] = t.value;
    }
  }
  x_.assign(total, 0.0);
  position_.assign(total, -1);
  status_.assign(total, VarStatus::kAtLower);
}

double Simplex::nonbasic_value(int j, VarStatus s) const {
  const double lo = lo_[static_cast<std::size_t>(j)];
  const double up = up_[static_cast<std::size_t>(j)];
  switch (s) {
    case VarStatus::kAtUpper:
      if (std::isfinite(up)) return up;
      return std::isfinite(lo) ? lo : 0.0;
    case VarStatus::kAtLower:
      if (std::isfinite(lo)) return lo;
      return std::isfinite(up) ? up : 0.0;
    default:
      return 0.0;
  }
}

void Simplex::cold_basis() {
  head_.assign(static_cast<std::size_t>(m_), 0);
  for (int j = 0; j < n_; ++j) {
    const double lo = lo_[static_cast<std::size_t>(j)];
    const double up = up_[static_cast<std::size_t>(j)];
    VarStatus s = VarStatus::kAtLower;
    if (!std::isfinite(lo)) s = std::isfinite(up) ? VarStatus::kAtUpper : VarStatus::kFreeZero;
    status_[static_cast<std::size_t>(j)] = s;
    position_[static_cast<std::size_t>(j)] = -1;
    x_[static_cast<std::size_t>(j)] = nonbasic_value(j, s);
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    head_[static_cast<std::size_t>(i)] = j;
    position_[static_cast<std::size_t>(j)] = i;
    status_[static_cast<std::size_t>(j)] = VarStatus::kBasic;
  }
}

bool Simplex::warm_basis(const Basis& basis) {
  if (static_cast<int>(basis.columns.size()) != n_ || static_cast<int>(basis.rows.size()) != m_) {
    return false;
  }
  head_.clear();
  for (int j = 0; j < n_ + m_; ++j) {
    const VarStatus s = j < n_ ? basis.columns[static_cast<std::size_t>(j)]
                               : basis.rows[static_cast<std::size_t>(j - n_)];
    status_[static_cast<std::size_t>(j)] = s;
    position_[static_cast<std::size_t>(j)] = -1;
    if (s == VarStatus::kBasic) {
      position_[static_cast<std::size_t>(j)] = static_cast<int>(head_.size());
      head_.push_back(j);
    } else {
      x_[static_cast<std::size_t>(j)] = nonbasic_value(j, s);
    }
  }
  return static_cast<int>(head_.size()) == m_;
}

bool Simplex::factorize() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(3 * m_));
  for (int p = 0; p < m_; ++p) {
    for_column(head_[static_cast<std::size_t>(p)],
               [&](int row, double v) { triplets.emplace_back(row, p, v); });
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  lu_.compute(basis);
  return lu_.info() == Eigen::Success;
}

void Simplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const Eta& eta : etas_) {
    double& pivot_entry = v[eta.position];
    if (pivot_entry == 0.0) continue;
    pivot_entry /= eta.pivot;
    const double scale = pivot_entry;
    for (std::size_t k = 0; k < eta.index.size(); ++k) v[eta.index[k]] -= eta.value[k] * scale;
  }
}

void Simplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->position];
    for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
    v[it->position] = s / it->pivot;
  }
  v = lu_.transpose().solve(v);
}

void Simplex::recompute_primal() {
  Eigen::VectorXd r(m_);
  for (int i = 0; i < m_; ++i) r[i] = b_[static_cast<std::size_t>(i)];
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[static_cast<std::size_t>(j)] == VarStatus::kBasic) continue;
    const double xj = x_[static_cast<std::size_t>(j)];
    if (xj == 0.0) continue;
    for_column(j, [&](int row, double v) { r[row] -= v * xj; });
  }
  ftran(r);
  for (int p = 0; p < m_; ++p) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(p)])] = r[p];
}

double Simplex::infeasibility(int j) const {
  const double v = x_[static_cast<std::size_t>(j)];
  const double tol = options_.primal_tolerance;
  if (v < lo_[static_cast<std::size_t>(j)] - tol) return lo_[static_cast<std::size_t>(j)] - v;
  if (v > up_[static_cast<std::size_t>(j)] + tol) return v - up_[static_cast<std::size_t>(j)];
  return 0.0;
}

double Simplex::total_infeasibility() const {
  double s = 0.0;
  for (int j : head_) s += infeasibility(j);
  return s;
}

void Simplex::compute_duals(Phase phase, Eigen::VectorXd& y) const {
  y.setZero(m_);
  const double tol = options_.primal_tolerance;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[static_cast<std::size_t>(p)];
    if (phase == Phase::kOptimality) {
      y[p] = cost_[static_cast<std::size_t>(j)];
    } else {
      const double v = x_[static_cast<std::size_t>(j)];
      if (v < lo_[static_cast<std::size_t>(j)] - tol) y[p] = -1.0;
      else if (v > up_[static_cast<std::size_t>(j)] + tol) y[p] = 1.0;
    }
  }
  btran(y);
}

double Simplex::reduced_cost(int j, Phase phase, const Eigen::VectorXd& y) const {
  double d = phase == Phase::kOptimality ? cost_[static_cast<std::size_t>(j)] : 0.0;
  for_column(j, [&](int row, double v) { d -= y[row] * v; });
  return d;
}

Simplex::Choice Simplex::price(Phase phase, const Eigen::VectorXd& y) const {
  Choice best;
  double best_score = 0.0;
  const double tol = options_.dual_tolerance;
  for (int j = 0; j < n_ + m_; ++j) {
    const VarStatus s = status_[static_cast<std::size_t>(j)];
    if (s == VarStatus::kBasic) continue;
    if (lo_[static_cast<std::size_t>(j)] == up_[static_cast<std::size_t>(j)]) continue;
    const double d = reduced_cost(j, phase, y);
    double direction = 0.0;
    if (s == VarStatus::kAtLower && d < -tol) direction = 1.0;
    else if (s == VarStatus::kAtUpper && d > tol) direction = -1.0;
    else if (s == VarStatus::kFreeZero && std::abs(d) > tol) direction = d < 0.0 ? 1.0 : -1.0;
    if (direction == 0.0) continue;
    if (bland_) return Choice{j, direction};
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = Choice{j, direction};
    }
  }
  return best;
}

Simplex::Step Simplex::ratio_test(Phase phase, const Eigen::VectorXd& alpha, int entering,
                                  double direction) const {
  const double tol = options_.primal_tolerance;
  // Candidate limit for basis position p moving at `rate` per unit step:
  // returns (relaxed, exact, at_upper) or nullopt when p does not block.
  struct Limit {
    double relaxed;
    double exact;
    bool at_upper;
  };
  auto limit = [&](int p, double rate) -> std::optional<Limit> {
    const int j = head_[static_cast<std::size_t>(p)];
    const double v = x_[static_cast<std::size_t>(j)];
    const double lo = lo_[static_cast<std::size_t>(j)];
    const double up = up_[static_cast<std::size_t>(j)];
    const bool below = phase == Phase::kFeasibility && v < lo - tol;
    const bool above = phase == Phase::kFeasibility && v > up + tol;
    if (rate < 0.0) {
      if (below) return std::nullopt;
      const double target = above ? up : lo;
      if (!std::isfinite(target)) return std::nullopt;
      const double slack = std::max(v - target, 0.0);
      return Limit{(slack + tol) / -rate, slack / -rate, above};
    }
    if (above) return std::nullopt;
    const double target = below ? lo : up;
    if (!std::isfinite(target)) return std::nullopt;
    const double slack = std::max(target - v, 0.0);
    return Limit{(slack + tol) / rate, slack / rate, !below};
  };

  Step step;
  const double span = up_[static_cast<std::size_t>(entering)] - lo_[static_cast<std::size_t>(entering)];

  if (bland_) {
    // Textbook minimum ratio, ties to the smallest variable index.
    double best = kInfinity;
    for (int p = 0; p < m_; ++p) {
      if (std::abs(alpha[p]) <= kRatioZero) continue;
      const auto lim = limit(p, -direction * alpha[p]);
      if (!lim) continue;
      const double scale = 1e-12 * (1.0 + std::abs(lim->exact));
      if (step.position < 0 || lim->exact < best - scale ||
          (lim->exact <= best + scale &&
           head_[static_cast<std::size_t>(p)] < head_[static_cast<std::size_t>(step.position)])) {
        best = std::min(best, lim->exact);
        step.position = p;
        step.leaves_at_upper = lim->at_upper;
      }
    }
    step.length = best;
  } else {
    double relaxed = kInfinity;
    for (int p = 0; p < m_; ++p) {
      if (std::abs(alpha[p]) <= kRatioZero) continue;
      if (const auto lim = limit(p, -direction * alpha[p])) relaxed = std::min(relaxed, lim->relaxed);
    }
    double best_pivot = 0.0;
    for (int p = 0; p < m_ && std::isfinite(relaxed); ++p) {
      if (std::abs(alpha[p]) <= kRatioZero) continue;
      const auto lim = limit(p, -direction * alpha[p]);
      if (!lim || lim->exact > relaxed) continue;
      if (std::abs(alpha[p]) > best_pivot) {
        best_pivot = std::abs(alpha[p]);
        step.position = p;
        step.length = lim->exact;
        step.leaves_at_upper = lim->at_upper;
      }
    }
    if (step.position < 0) step.length = kInfinity;
  }

  if (span <= step.length) {
    step.position = -1;
    step.length = span;
  }
  step.unbounded = !std::isfinite(step.length);
  return step;
}

void Simplex::pivot(int entering, double direction, const Eigen::VectorXd& alpha, const Step& step) {
  const double t = step.length;
  x_[static_cast<std::size_t>(entering)] += direction * t;
  if (t != 0.0) {
    for (int p = 0; p < m_; ++p) {
      if (alpha[p] != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(p)])] -= direction * t * alpha[p];
    }
  }
  if (step.position < 0) {
    const bool to_upper = direction > 0.0;
    status_[static_cast<std::size_t>(entering)] = to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
    x_[static_cast<std::size_t>(entering)] =
        to_upper ? up_[static_cast<std::size_t>(entering)] : lo_[static_cast<std::size_t>(entering)];
    return;
  }
  const int r = step.position;
  const int leaving = head_[static_cast<std::size_t>(r)];
  const auto lv = static_cast<std::size_t>(leaving);
  if (step.leaves_at_upper) {
    status_[lv] = VarStatus::kAtUpper;
    x_[lv] = up_[lv];
  } else {
    status_[lv] = VarStatus::kAtLower;
    x_[lv] = lo_[lv];
  }
  if (lo_[lv] == up_[lv]) status_[lv] = VarStatus::kAtLower;
  position_[lv] = -1;
  head_[static_cast<std::size_t>(r)] = entering;
  position_[static_cast<std::size_t>(entering)] = r;
  status_[static_cast<std::size_t>(entering)] = VarStatus::kBasic;

  Eta eta;
  eta.position = r;
  eta.pivot = alpha[r];
  for (int p = 0; p < m_; ++p) {
    if (p != r && std::abs(alpha[p]) > 1e-14) {
      eta.index.push_back(p);
      eta.value.push_back(alpha[p]);
    }
  }
  etas_.push_back(std::move(eta));
}

LpSolution Simplex::finish(LpStatus status) {
  LpSolution out;
  out.status = status;
  out.iterations = iterations_;
  out.values.assign(x_.begin(), x_.begin() + n_);
  if (status == LpStatus::kOptimal) {
    for (int j = 0; j < n_; ++j) {
      auto& v = out.values[static_cast<std::size_t>(j)];
      v = std::clamp(v, lo_[static_cast<std::size_t>(j)], up_[static_cast<std::size_t>(j)]);
    }
    Eigen::VectorXd y;
    compute_duals(Phase::kOptimality, y);
    out.duals.assign(y.data(), y.data() + m_);
  }
  out.objective = problem_.objective_value(out.values);
  out.basis.columns.assign(status_.begin(), status_.begin() + n_);
  out.basis.rows.assign(status_.begin() + n_, status_.end());
  return out;
}

LpSolution Simplex::run() {
  bool started = false;
  if (options_.warm_start != nullptr && warm_basis(*options_.warm_start)) started = factorize();
  if (!started) {
    cold_basis();
    if (!factorize()) throw Breakdown{};
  }
  recompute_primal();

  Eigen::VectorXd y(m_), alpha(m_);
  bool verified = false;  // optimality/infeasibility confirmed on a fresh factorization
  while (iterations_ < options_.max_iterations) {
    if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
      if (!factorize()) throw Breakdown{};
      recompute_primal();
    }
    const Phase phase = total_infeasibility() > 0.0 ? Phase::kFeasibility : Phase::kOptimality;
    compute_duals(phase, y);
    const Choice choice = price(phase, y);
    if (choice.column < 0) {
      if (!verified && !etas_.empty()) {
        if (!factorize()) throw Breakdown{};
        recompute_primal();
        verified = true;
        continue;
      }
      return finish(phase == Phase::kFeasibility ? LpStatus::kInfeasible : LpStatus::kOptimal);
    }
    verified = false;

    alpha.setZero(m_);
    for_column(choice.column, [&](int row, double v) { alpha[row] = v; });
    ftran(alpha);
    const Step step = ratio_test(phase, alpha, choice.column, choice.direction);
    if (step.unbounded) {
      if (phase == Phase::kOptimality) return finish(LpStatus::kUnbounded);
      throw Breakdown{};
    }
    if (step.position >= 0 && std::abs(alpha[step.position]) < options_.pivot_tolerance) {
      throw Breakdown{};
    }
    pivot(choice.column, choice.direction, alpha, step);
    ++iterations_;

    if (step.length <= 1e-12) {
      if (++degenerate_streak_ >= kDegenerateStreakForBland) bland_ = true;
    } else {
      degenerate_streak_ = 0;
      bland_ = false;
    }
  }
  return finish(LpStatus::kIterationLimit);
}

// Deterministic relative perturbation of bounds and right-hand sides.
LpProblem perturbed(const LpProblem& problem) {
  LpProblem out = problem;
  auto jitter = [](int k) {
    const std::uint64_t h = (static_cast<std::uint64_t>(k) + 1) * 0x9e3779b97f4a7c15ULL;
    return static_cast<double>((h >> 11) & 0xFFFF) / 65536.0;  // [0, 1)
  };
  for (int j = 0; j < out.column_count(); ++j) {
    const double lo = out.lower(j);
    const double up = out.upper(j);
    if (lo == up) continue;
    const double d = 1e-7 * (1.0 + jitter(j));
    out.set_bounds(j, std::isfinite(lo) ? lo - d * (1.0 + std::abs(lo)) : lo,
                   std::isfinite(up) ? up + d * (1.0 + std::abs(up)) : up);
  }
  for (int i = 0; i < out.row_count(); ++i) {
    if (out.sense(i) == RowSense::kLessEqual) {
      out.set_rhs(i, out.rhs(i) + 1e-7 * (1.0 + jitter(i + out.column_count())) * (1.0 + std::abs(out.rhs(i))));
    }
  }
  return out;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SolveOptions& options) {
  problem.validate();
  try {
    return Simplex(problem, options).run();
  } catch (const Breakdown&) {
  }
  // Numerical breakdown: solve a slightly perturbed copy from a cold start,
  // then finish the original problem from the perturbed optimal basis.
  SolveOptions cold = options;
  cold.warm_start = nullptr;
  cold.refactor_interval = std::max(10, options.refactor_interval / 4);
  const LpProblem relaxed = perturbed(problem);
  LpSolution first;
  try {
    first = Simplex(relaxed, cold).run();
  } catch (const Breakdown&) {
    throw Error("lp: numerical breakdown persists after perturbation restart");
  }
  SolveOptions finish = cold;
  finish.warm_start = &first.basis;
  try {
    LpSolution out = Simplex(problem, finish).run();
    out.iterations += first.iterations;
    return out;
  } catch (const Breakdown&) {
    throw Error("lp: numerical breakdown persists after perturbation restart");
  }
}

}  // namespace uflow::lp
