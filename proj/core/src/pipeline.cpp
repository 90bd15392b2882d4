#include "graphda/pipeline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "graphda/spectral.hpp"
#include "graphda/weight_update.hpp"

namespace graphda {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

// (S U)^T y without materializing S U.
Eigen::MatrixXd label_correlation(const Eigen::MatrixXd& u, std::span<const Index> rows,
                                  const Eigen::MatrixXd& y) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(u.cols(), y.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= u.rows()) throw IndexOutOfRange(rows[k], u.rows());
    c.noalias() += u.row(rows[k]).transpose() * y.row(static_cast<Index>(k));
  }
  return c;
}

struct Estimate {
  SpectralBasis source_basis;
  SpectralBasis target_basis;
  CoefficientPair coefficients;
  double objective = 0.0;
};

class Solver {
 public:
  Solver(const LabelProblem& problem, const DaglConfig& config)
      : p_(problem), cfg_(config) {
    p_.validate();
    cfg_.validate(p_.source_size(), p_.target_size());
    ys_ = label_indicator(p_.source_labels, p_.class_count);
    yt_ = label_indicator(p_.target_labels, p_.class_count);
    ws_ = build_knn_graph(p_.source_points, cfg_.neighbors, cfg_.kernel_width);
    wt_ = build_knn_graph(p_.target_points, cfg_.neighbors, cfg_.kernel_width);
  }

  Estimate estimate() const {
    require_labeled_components(ws_, p_.source_labeled, "source");
    require_labeled_components(wt_, p_.target_labeled, "target");
    Estimate e;
    e.source_basis = smallest_eigenpairs(normalized_laplacian(ws_), cfg_.basis_size);
    e.target_basis = smallest_eigenpairs(normalized_laplacian(wt_), cfg_.basis_size);
    if (cfg_.align_signs) {
      align_target_signs(e.source_basis, e.target_basis, p_.source_labeled, p_.target_labeled,
                         ys_, yt_);
    }
    e.coefficients = solve_coefficients(e.source_basis, e.target_basis, p_.source_labeled,
                                        p_.target_labeled, ys_, yt_, cfg_.mu);
    e.objective = sda_objective(e.source_basis, e.target_basis, p_.source_labeled,
                                p_.target_labeled, ys_, yt_, cfg_.mu, e.coefficients);
    return e;
  }

  void learn(Index rounds, std::vector<IterationTrace>& trace) {
    const DegreeBounds bs = resolve_degree_bounds(cfg_, ws_);
    const DegreeBounds bt = resolve_degree_bounds(cfg_, wt_);
    for (Index it = 0; it < rounds; ++it) {
      const Estimate e = estimate();
      if (!std::isfinite(e.objective)) throw Error("coefficient objective is not finite");
      const Eigen::MatrixXd fs = igft(e.source_basis, e.coefficients.source);
      const Eigen::MatrixXd ft = igft(e.target_basis, e.coefficients.target);
      const auto us = solve_weight_update(p_.source_points, ws_, fs, degree_vector(ws_),
                                          cfg_.mu_source, bs.min, bs.max);
      const auto ut = solve_weight_update(p_.target_points, wt_, ft, degree_vector(wt_),
                                          cfg_.mu_target, bt.min, bt.max);
      ws_ = prune_edges(us.weights, cfg_.prune_threshold);
      wt_ = prune_edges(ut.weights, cfg_.prune_threshold);
      IterationTrace t;
      t.sda_objective = e.objective;
      t.source_lp_objective = us.objective;
      t.target_lp_objective = ut.objective;
      t.source_lp_iterations = us.lp_iterations;
      t.target_lp_iterations = ut.lp_iterations;
      t.source_edges = ws_.edge_count();
      t.target_edges = wt_.edge_count();
      trace.push_back(t);
    }
  }

  DaglResult finish(std::vector<IterationTrace> trace, std::span<const int> truth,
                    std::span<const Index> evaluation) const {
    const Estimate e = estimate();
    DaglResult r;
    r.source_weights = ws_;
    r.target_weights = wt_;
    r.coefficients = e.coefficients;
    r.source_estimate = igft(e.source_basis, e.coefficients.source);
    r.target_estimate = igft(e.target_basis, e.coefficients.target);
    r.trace = std::move(trace);
    r.final_objective = e.objective;
    r.target_predictions = argmax_rows(r.target_estimate);
    if (!truth.empty()) {
      r.metrics = misclassification_rate(r.target_predictions, truth, evaluation, p_.class_count);
    }
    return r;
  }

 private:
  const LabelProblem& p_;
  const DaglConfig& cfg_;
  Eigen::MatrixXd ys_;
  Eigen::MatrixXd yt_;
  WeightMatrix ws_;
  WeightMatrix wt_;
};

}  // namespace

void DaglConfig::validate(Index source_nodes, Index target_nodes) const {
  require_positive(mu, "mu");
  require_positive(mu_source, "mu_source");
  require_positive(mu_target, "mu_target");
  if (basis_size < 1 || basis_size > std::min(source_nodes, target_nodes)) {
    throw std::invalid_argument("basis size R must lie in [1, min(n_s, n_t)]");
  }
  if (neighbors < 1 || neighbors >= std::min(source_nodes, target_nodes)) {
    throw std::invalid_argument("K must lie in [1, n)");
  }
  if (kernel_width) require_positive(*kernel_width, "kernel_width");
  if (!(prune_threshold >= 0.0 && prune_threshold < 1.0)) {
    throw std::invalid_argument("prune threshold W_min must lie in [0, 1)");
  }
  if (degree_min) require_positive(*degree_min, "d_min");
  else require_positive(degree_min_scale, "degree_min_scale");
  if (degree_max) require_positive(*degree_max, "d_max");
  else require_positive(degree_max_scale, "degree_max_scale");
  if (degree_min && degree_max && !(*degree_max >= *degree_min)) {
    throw std::invalid_argument("d_max must be >= d_min");
  }
  if (!degree_min && !degree_max && !(degree_max_scale >= degree_min_scale)) {
    throw std::invalid_argument("degree_max_scale must be >= degree_min_scale");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

Eigen::MatrixXd label_indicator(std::span<const int> classes, int class_count) {
  return 2.0 * one_hot(classes, class_count).array() - 1.0;
}

DegreeBounds resolve_degree_bounds(const DaglConfig& config, const WeightMatrix& initial) {
  const double mean = initial.size() > 0 ? degree_vector(initial).mean() : 0.0;
  DegreeBounds b;
  b.min = config.degree_min ? *config.degree_min : config.degree_min_scale * mean;
  b.max = config.degree_max ? *config.degree_max : config.degree_max_scale * mean;
  if (!(b.min > 0.0) || !(b.max >= b.min) || !std::isfinite(b.max)) {
    throw std::invalid_argument("degree bounds must satisfy 0 < d_min <= d_max < inf (got " +
                                std::to_string(b.min) + ", " + std::to_string(b.max) + ")");
  }
  return b;
}

void require_labeled_components(const WeightMatrix& w, std::span<const Index> labeled,
                                const char* domain) {
  const auto comp = connected_components(w);
  const Index count = component_count(comp);
  std::vector<bool> has_label(static_cast<std::size_t>(count), false);
  for (Index i : labeled) has_label[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = true;
  std::vector<Index> orphans;
  for (Index i = 0; i < w.size(); ++i) {
    if (!has_label[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])]) orphans.push_back(i);
  }
  if (!orphans.empty()) throw DisconnectedComponent(domain, std::move(orphans));
}

Index align_target_signs(const SpectralBasis& source, SpectralBasis& target,
                         std::span<const Index> source_labeled,
                         std::span<const Index> target_labeled, const Eigen::MatrixXd& ys,
                         const Eigen::MatrixXd& yt) {
  if (source.size() != target.size()) throw std::invalid_argument("align_target_signs: R mismatch");
  if (ys.rows() != static_cast<Index>(source_labeled.size()) ||
      yt.rows() != static_cast<Index>(target_labeled.size()) || ys.cols() != yt.cols()) {
    throw std::invalid_argument("align_target_signs: label shape mismatch");
  }
  const Eigen::MatrixXd cs = label_correlation(source.eigenvectors, source_labeled, ys);
  const Eigen::MatrixXd ct = label_correlation(target.eigenvectors, target_labeled, yt);
  Index flips = 0;
  for (Index k = 0; k < source.size(); ++k) {
    if (cs.row(k).dot(ct.row(k)) < 0.0) {
      target.eigenvectors.col(k) *= -1.0;
      ++flips;
    }
  }
  return flips;
}

DaglResult run_sda(const LabelProblem& problem, const DaglConfig& config,
                   std::span<const int> truth, std::span<const Index> evaluation) {
  Solver s(problem, config);
  return s.finish({}, truth, evaluation);
}

DaglResult run_sda_dagl(const LabelProblem& problem, const DaglConfig& config,
                        std::span<const int> truth, std::span<const Index> evaluation) {
  Solver s(problem, config);
  std::vector<IterationTrace> trace;
  s.learn(config.max_iterations, trace);
  return s.finish(std::move(trace), truth, evaluation);
}

DaglResult run_method(Method method, const Experiment& experiment, const DaglConfig& config) {
  return method == Method::Sda
             ? run_sda(experiment.problem, config, experiment.target_truth, experiment.evaluation)
             : run_sda_dagl(experiment.problem, config, experiment.target_truth, experiment.evaluation);
}

}  // namespace graphda
