#pragma once

#include <vector>

#include <Eigen/Core>

#include "graphda/graph.hpp"
#include "graphda/linprog.hpp"

namespace graphda {

/// Data behind one domain's weight LP. Entry k of every vector refers to edges[k].
struct WeightLpSpec {
  Index nodes = 0;
  std::vector<Edge> edges;                  // current edges, weights as before the update
  std::vector<double> squared_distances;    // |x_i - x_j|^2
  std::vector<double> smoothness;           // sum over classes of h_i h_j
  std::vector<double> coefficients;         // 2 (mu |x_i - x_j|^2 - smoothness)
  std::vector<double> node_lower;           // min(d_min, edges at node)
  double mu = 0.0;
  double d_min = 0.0;
  double d_max = 0.0;
};

/// Assembles the LP over the nonzero edges of `w`: minimize
/// sum_e coefficient_e W_e with node_lower_i <= sum_{e at i} W_e <= d_max and
/// 0 <= W_e <= 1. The smoothness term uses h = D^{-1/2} f_hat with the
/// degrees `degrees` taken before the update.
///
/// Throws IsolatedNode when `w` has a zero-degree node and
/// std::invalid_argument on size mismatches or 0 < d_min <= d_max violations.
WeightLpSpec build_weight_spec(const Eigen::MatrixXd& points, const WeightMatrix& w,
                               const Eigen::MatrixXd& f_hat, const DegreeVector& degrees,
                               double mu, double d_min, double d_max);

LpProblem to_lp(const WeightLpSpec& spec);

/// Weight matrix from an LP solution. Values below 1e-12 become absent edges.
/// Throws InfeasibleWeights listing the nodes whose degree rows are violated
/// at the point where phase one stopped, or Error for an unbounded result.
WeightMatrix update_weights(const WeightLpSpec& spec, const LpSolution& solution);

struct WeightUpdateResult {
  WeightMatrix weights;
  double objective = 0.0;
  Index lp_iterations = 0;
};

/// build_weight_spec + solve_lp + update_weights.
WeightUpdateResult solve_weight_update(const Eigen::MatrixXd& points, const WeightMatrix& w,
                                       const Eigen::MatrixXd& f_hat, const DegreeVector& degrees,
                                       double mu, double d_min, double d_max);

}  // namespace graphda
