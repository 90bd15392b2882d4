#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "graphda/data.hpp"
#include "graphda/graph.hpp"
#include "graphda/sda.hpp"
#include "graphda/spectral.hpp"

namespace graphda {

/// Hyperparameters of the alternating graph-learning loop. The defaults
/// mirror config/dagl_default.json.
struct DaglConfig {
  double mu = 1.0;           // coefficient coupling
  double mu_source = 0.01;   // distance penalty, source graph
  double mu_target = 0.01;   // distance penalty, target graph
  Index basis_size = 20;     // R
  Index neighbors = 10;      // K of the initial k-NN graphs
  std::optional<double> kernel_width;  // empty: automatic per domain
  double prune_threshold = 0.1;        // W_min
  std::optional<double> degree_min;    // explicit d_min
  double degree_min_scale = 1.0;       // else d_min = scale * mean initial degree
  std::optional<double> degree_max;    // explicit d_max
  double degree_max_scale = 2.0;       // else d_max = scale * mean initial degree
  Index max_iterations = 5;
  bool align_signs = true;             // orient target basis vectors by label correlation
  std::uint64_t seed = 1;              // recorded with results; the loop itself is deterministic

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate(Index source_nodes, Index target_nodes) const;
};

struct IterationTrace {
  double sda_objective = 0.0;
  double source_lp_objective = 0.0;
  double target_lp_objective = 0.0;
  Index source_lp_iterations = 0;
  Index target_lp_iterations = 0;
  Index source_edges = 0;  // after the update and prune
  Index target_edges = 0;
};

struct DaglResult {
  WeightMatrix source_weights;
  WeightMatrix target_weights;
  CoefficientPair coefficients;
  Eigen::MatrixXd source_estimate;  // n_s x C
  Eigen::MatrixXd target_estimate;  // n_t x C
  std::vector<IterationTrace> trace;
  double final_objective = 0.0;
  std::vector<int> target_predictions;
  std::optional<Metrics> metrics;
};

/// Known labels as a +-1 one-vs-rest matrix (one column per class).
Eigen::MatrixXd label_indicator(std::span<const int> classes, int class_count);

/// Degree bounds actually used for a graph with the given initial weights.
struct DegreeBounds {
  double min = 0.0;
  double max = 0.0;
};
DegreeBounds resolve_degree_bounds(const DaglConfig& config, const WeightMatrix& initial);

/// Throws DisconnectedComponent when some component of w has no labeled node.
void require_labeled_components(const WeightMatrix& w, std::span<const Index> labeled,
                                const char* domain);

/// Flips target basis vectors whose correlation with the known target labels
/// has the opposite sign of the matching source vector's correlation with the
/// source labels. Vectors with zero correlation on either side are left alone.
/// Returns the number of flipped vectors.
Index align_target_signs(const SpectralBasis& source, SpectralBasis& target,
                         std::span<const Index> source_labeled,
                         std::span<const Index> target_labeled, const Eigen::MatrixXd& ys,
                         const Eigen::MatrixXd& yt);

/// Fixed-graph baseline: k-NN graphs, bases and coefficients computed once.
/// When `truth` is non-empty the metrics are computed over `evaluation`.
DaglResult run_sda(const LabelProblem& problem, const DaglConfig& config,
                   std::span<const int> truth = {}, std::span<const Index> evaluation = {});

/// The graph-learning loop: for max_iterations rounds recompute normalized
/// Laplacians and bases, solve the coefficients, re-solve both weight LPs
/// and prune below W_min. The reported estimates come from one more basis
/// and coefficient solve on the final graphs.
DaglResult run_sda_dagl(const LabelProblem& problem, const DaglConfig& config,
                        std::span<const int> truth = {}, std::span<const Index> evaluation = {});

/// Runs one experiment with either method.
enum class Method { Sda, SdaDagl };
DaglResult run_method(Method method, const Experiment& experiment, const DaglConfig& config);

}  // namespace graphda
