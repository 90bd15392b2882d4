#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "graphda/errors.hpp"

namespace graphda {

/// One undirected edge, stored with i < j.
struct Edge {
  Index i = 0;
  Index j = 0;
  double weight = 0.0;
};

struct Neighbor {
  Index node = 0;
  double weight = 0.0;
};

/// Symmetric nonnegative sparse weight matrix without self-loops.
///
/// Every unordered pair is stored once (i < j), edges are kept sorted by
/// (i, j) and every stored weight is strictly positive. Instances are
/// immutable after construction.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(Index n);

  /// Builds from an arbitrary edge list. Orientation is normalized to i < j.
  /// Throws std::invalid_argument on self-loops, out-of-range nodes,
  /// non-finite or negative weights, or duplicate pairs. Zero weights are dropped.
  static WeightMatrix from_edges(Index n, std::vector<Edge> edges);

  Index size() const noexcept { return n_; }
  Index edge_count() const noexcept { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// W_ij (0 when absent, including i == j).
  double weight(Index i, Index j) const;

  /// Per-node neighbor lists, each sorted by neighbor index.
  std::vector<std::vector<Neighbor>> adjacency() const;

  Eigen::MatrixXd dense() const;

  friend bool operator==(const WeightMatrix& a, const WeightMatrix& b);

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
};

using DegreeVector = Eigen::VectorXd;
using LaplacianMatrix = Eigen::MatrixXd;

/// Euclidean k-NN graph with Gaussian weights exp(-|x_i - x_j|^2 / sigma^2).
///
/// Rows of `points` are samples. An edge exists when either endpoint selects
/// the other among its K nearest neighbors; distance ties go to the lower
/// index. With `sigma` empty the width is the mean distance over all n*K
/// selected (node, neighbor) pairs.
WeightMatrix build_knn_graph(const Eigen::MatrixXd& points, Index k,
                             std::optional<double> sigma = std::nullopt);

/// Kernel width build_knn_graph would pick for sigma = auto.
double auto_kernel_width(const Eigen::MatrixXd& points, Index k);

/// d_i = sum_j W_ij, summed in ascending j.
DegreeVector degree_vector(const WeightMatrix& w);

/// D - W.
LaplacianMatrix laplacian(const WeightMatrix& w);

/// D^{-1/2} (D - W) D^{-1/2}. Throws IsolatedNode for a zero-degree node.
LaplacianMatrix normalized_laplacian(const WeightMatrix& w);

/// Quadratic form f^T L f.
double dirichlet_energy(const LaplacianMatrix& l, const Eigen::VectorXd& f);

/// sum over edges of W_ij (f_i - f_j)^2, i.e. f^T (D - W) f without forming L.
double edge_variation(const WeightMatrix& w, const Eigen::VectorXd& f);

/// Drops every edge with weight < threshold.
WeightMatrix prune_edges(const WeightMatrix& w, double threshold);

/// Component label per node; components are numbered in order of their
/// lowest-index node.
std::vector<Index> connected_components(const WeightMatrix& w);

/// Number of components given the labels from connected_components.
Index component_count(std::span<const Index> labels);

}  // namespace graphda
