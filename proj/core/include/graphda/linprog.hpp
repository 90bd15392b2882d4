#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "graphda/errors.hpp"

namespace graphda {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpTerm {
  Index var = 0;
  double coef = 0.0;
};

/// lower <= sum(coef * x[var]) <= upper; either side may be infinite.
struct LpConstraint {
  std::vector<LpTerm> terms;
  double lower = -kInf;
  double upper = kInf;
};

/// minimize cost^T x subject to the row constraints and per-variable boxes.
struct LpProblem {
  std::vector<double> cost;
  std::vector<LpConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  /// n variables with cost 0 and box [0, +inf).
  static LpProblem with_variables(Index n);

  Index variable_count() const noexcept { return static_cast<Index>(cost.size()); }

  /// Throws std::invalid_argument on non-finite costs, inverted bounds or bad indices.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  /// Optimal point. For Infeasible it is the point where phase one stopped.
  std::vector<double> x;
  double objective = 0.0;
  Index iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  /// Basis inverse is rebuilt from scratch after this many updates.
  Index refactor_interval = 100;
  /// Consecutive degenerate pivots before pricing falls back to Bland's rule.
  Index stall_limit = 30;
};

/// Two-phase bounded-variable primal simplex (revised form, dense basis
/// inverse). Pricing is Dantzig's rule with lowest-index tie-breaking; after
/// a run of degenerate pivots it switches to Bland's rule until the objective
/// moves again, which rules out cycling. Fully deterministic.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

/// Largest violation of any row or box constraint at x.
double max_violation(const LpProblem& problem, const std::vector<double>& x);

/// c^T x.
double lp_objective(const LpProblem& problem, const std::vector<double>& x);

}  // namespace graphda
