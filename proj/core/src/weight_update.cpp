#include "graphda/weight_update.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphda {

WeightLpSpec build_weight_spec(const Eigen::MatrixXd& points, const WeightMatrix& w,
                               const Eigen::MatrixXd& f_hat, const DegreeVector& degrees,
                               double mu, double d_min, double d_max) {
  const Index n = w.size();
  if (points.rows() != n || f_hat.rows() != n || degrees.size() != n) {
    throw std::invalid_argument("weight LP inputs disagree on the node count");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be finite and >= 0");
  if (!(d_min > 0.0) || !(d_min <= d_max) || !std::isfinite(d_max)) {
    throw std::invalid_argument("degree bounds must satisfy 0 < d_min <= d_max < inf");
  }
  Eigen::VectorXd inv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (!(degrees(i) > 0.0)) throw IsolatedNode(i);
    inv_sqrt(i) = 1.0 / std::sqrt(degrees(i));
  }
  const Eigen::MatrixXd h = inv_sqrt.asDiagonal() * f_hat;

  WeightLpSpec spec;
  spec.nodes = n;
  spec.edges = w.edges();
  spec.mu = mu;
  spec.d_min = d_min;
  spec.d_max = d_max;
  std::vector<Index> edge_count(static_cast<std::size_t>(n), 0);
  for (const auto& e : spec.edges) {
    const double dist2 = (points.row(e.i) - points.row(e.j)).squaredNorm();
    const double smooth = h.row(e.i).dot(h.row(e.j));
    spec.squared_distances.push_back(dist2);
    spec.smoothness.push_back(smooth);
    spec.coefficients.push_back(2.0 * (mu * dist2 - smooth));
    ++edge_count[static_cast<std::size_t>(e.i)];
    ++edge_count[static_cast<std::size_t>(e.j)];
  }
  for (Index i = 0; i < n; ++i) {
    if (edge_count[static_cast<std::size_t>(i)] == 0) throw IsolatedNode(i);
    spec.node_lower.push_back(std::min(d_min, static_cast<double>(edge_count[static_cast<std::size_t>(i)])));
  }
  return spec;
}

LpProblem to_lp(const WeightLpSpec& spec) {
  const Index m = static_cast<Index>(spec.edges.size());
  LpProblem p = LpProblem::with_variables(m);
  p.cost = spec.coefficients;
  p.upper.assign(static_cast<std::size_t>(m), 1.0);
  p.constraints.resize(static_cast<std::size_t>(spec.nodes));
  for (Index k = 0; k < m; ++k) {
    const auto& e = spec.edges[static_cast<std::size_t>(k)];
    p.constraints[static_cast<std::size_t>(e.i)].terms.push_back({k, 1.0});
    p.constraints[static_cast<std::size_t>(e.j)].terms.push_back({k, 1.0});
  }
  for (Index i = 0; i < spec.nodes; ++i) {
    auto& row = p.constraints[static_cast<std::size_t>(i)];
    row.lower = spec.node_lower[static_cast<std::size_t>(i)];
    row.upper = spec.d_max;
  }
  return p;
}

WeightMatrix update_weights(const WeightLpSpec& spec, const LpSolution& solution) {
  if (solution.status == LpStatus::Unbounded) throw Error("weight LP reported unbounded");
  if (solution.x.size() != spec.edges.size()) {
    throw std::invalid_argument("LP solution does not match the weight LP");
  }
  if (solution.status == LpStatus::Infeasible) {
    std::vector<double> deg(static_cast<std::size_t>(spec.nodes), 0.0);
    for (std::size_t k = 0; k < spec.edges.size(); ++k) {
      deg[static_cast<std::size_t>(spec.edges[k].i)] += solution.x[k];
      deg[static_cast<std::size_t>(spec.edges[k].j)] += solution.x[k];
    }
    std::vector<Index> bad;
    for (Index i = 0; i < spec.nodes; ++i) {
      const double d = deg[static_cast<std::size_t>(i)];
      if (d < spec.node_lower[static_cast<std::size_t>(i)] - 1e-9 || d > spec.d_max + 1e-9) {
        bad.push_back(i);
      }
    }
    throw InfeasibleWeights(std::move(bad));
  }
  std::vector<Edge> edges;
  edges.reserve(spec.edges.size());
  for (std::size_t k = 0; k < spec.edges.size(); ++k) {
    const double v = solution.x[k];
    if (v < 1e-12) continue;
    edges.push_back({spec.edges[k].i, spec.edges[k].j, std::min(v, 1.0)});
  }
  return WeightMatrix::from_edges(spec.nodes, std::move(edges));
}

WeightUpdateResult solve_weight_update(const Eigen::MatrixXd& points, const WeightMatrix& w,
                                       const Eigen::MatrixXd& f_hat, const DegreeVector& degrees,
                                       double mu, double d_min, double d_max) {
  const WeightLpSpec spec = build_weight_spec(points, w, f_hat, degrees, mu, d_min, d_max);
  const LpSolution sol = solve_lp(to_lp(spec));
  WeightUpdateResult out;
  out.weights = update_weights(spec, sol);
  out.objective = sol.objective;
  out.lp_iterations = sol.iterations;
  return out;
}

}  // namespace graphda
