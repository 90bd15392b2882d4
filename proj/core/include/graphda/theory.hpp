#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphda/graph.hpp"
#include "graphda/manifold.hpp"

namespace graphda {

/// Target nodes grouped by hop distance to the nearest labeled node.
/// layers[0] is the labeled set; every list is sorted.
struct LayerDecomposition {
  std::vector<std::vector<Index>> layers;
  std::vector<Index> hop;  // per node

  Index depth() const noexcept { return static_cast<Index>(layers.size()) - 1; }  // Q
};

/// Multi-source BFS from `labeled`. Throws UnreachableNodes when some node
/// has no path to a labeled node.
LayerDecomposition layer_decomposition(const WeightMatrix& w, std::span<const Index> labeled);

/// Per-layer neighbor counts and weights. Index q of each vector refers to
/// layer q; entries that the definitions leave open are 0.
struct LayerStats {
  std::vector<Index> k_min;        // q >= 1: min over j in layer q of |neighbors in q-1|
  std::vector<Index> k_max;        // q >= 0: max over j in layer q of |neighbors in q+1|
  std::vector<double> w_min_layer; // q >= 1: min weight between layers q and q-1
  double w_min = 0.0;              // min over q >= 1; 0 when Q = 0
};

LayerStats layer_stats(const LayerDecomposition& decomposition, const WeightMatrix& w);

/// sum_{q=1}^{Q} (|I_q| / K_q^min) (1 + sum_{l=1}^{q-1} prod_{m=l}^{q-1} |I_m| K_m^max / K_m^min).
/// Returns 0 when Q = 0.
double compute_kappa(const LayerStats& stats, const LayerDecomposition& decomposition);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// |sum_k lambda^s_k (a^s_k)^2 - sum_k lambda^t_k (a^t_k)^2| <= C^2 delta + 2 C lambda_R Delta_alpha.
struct Lemma1Result {
  InequalityCheck check;
  double c = 0.0;
  double delta = 0.0;
  double delta_alpha = 0.0;
  double lambda_r = 0.0;
};

Lemma1Result check_lemma1(const Eigen::VectorXd& alpha_source, const Eigen::VectorXd& alpha_target,
                          const Eigen::VectorXd& lambda_source, const Eigen::VectorXd& lambda_target);

/// Eigenvalue deviation of the unnormalized Laplacians of two kernel graphs
/// built on paired samples (x^s_i and x^t_i share gamma_i).
struct Lemma2Result {
  InequalityCheck check;     // lhs = delta_observed over the full spectrum, rhs = rho_max
  double epsilon_gamma = 0.0;
  double delta_w = 0.0;
  double rho_max = 0.0;
  double delta_observed = 0.0;
  Eigen::VectorXd beta_source;
  Eigen::VectorXd beta_target;
  std::vector<Index> k_source;
  std::vector<Index> k_target;
  Eigen::VectorXd lambda_source;  // full unnormalized spectra, ascending
  Eigen::VectorXd lambda_target;
};

/// The graphs must carry the spec's kernel weights phi(|x_i - x_j|).
Lemma2Result check_lemma2(const ManifoldSpec& spec, const PairedSample& sample,
                          const WeightMatrix& source, const WeightMatrix& target);

/// Per-layer error recursion. f_hat is clamped to f on layer 0 first.
struct Lemma3Layer {
  Index layer = 0;
  double b = 0.0;       // B_q, true labels
  double b_hat = 0.0;   // B_q for the estimate
  InequalityCheck check;
};

std::vector<Lemma3Layer> check_lemma3(const WeightMatrix& w, const Eigen::VectorXd& f,
                                      const Eigen::VectorXd& f_hat,
                                      const LayerDecomposition& decomposition,
                                      const LayerStats& stats);

/// Copy of f_hat with the labeled entries replaced by f.
Eigen::VectorXd clamp_to_labels(const Eigen::VectorXd& f_hat, const Eigen::VectorXd& f,
                                std::span<const Index> labeled);

/// Everything needed for the full error bound on one paired instance. The
/// source is fully labeled, so f_hat^s = f^s.
struct TheoremInstance {
  ManifoldSpec spec;
  PairedSample sample;
  WeightMatrix source_weights;
  WeightMatrix target_weights;
  Eigen::VectorXd source_truth;
  Eigen::VectorXd target_truth;
  Eigen::VectorXd target_estimate;  // before clamping
  std::vector<Index> target_labeled;
  Index basis_size = 10;
};

struct BoundReport {
  // Layers.
  Index depth = 0;  // Q
  std::vector<Index> layer_sizes;
  std::vector<Index> k_min;
  std::vector<Index> k_max;
  std::vector<double> w_min_layer;
  double w_min = 0.0;
  double kappa = 0.0;
  std::vector<Lemma3Layer> layers;
  // Manifold and graph constants.
  double a = 0.0;
  double m_source = 0.0;
  double m_target = 0.0;
  double kernel_lipschitz = 0.0;
  double kernel_peak = 0.0;
  double epsilon_gamma = 0.0;
  double delta_w = 0.0;
  double rho_max = 0.0;
  double delta = 0.0;           // over the first effective_basis_size eigenvalues
  double delta_observed = 0.0;  // over the full spectrum
  // Spectral coefficients.
  Index basis_size = 0;
  Index effective_basis_size = 0;
  double c = 0.0;
  double delta_alpha = 0.0;
  double lambda_r = 0.0;
  // Energies.
  double b = 0.0;              // f^t' L^t f^t
  double source_energy = 0.0;  // f^s' L^s f^s
  double b_hat = 0.0;          // source_energy + C^2 rho_max + 2 C lambda_R Delta_alpha
  double b_hat_observed = 0.0; // clamped f_hat^t' L^t f_hat^t
  // Result.
  double error = 0.0;          // |f_hat^t - f^t|^2 after clamping
  double bound = 0.0;          // kappa / w_min (sqrt(B) + sqrt(B_hat))^2, 0 when Q = 0
  bool fully_labeled = false;
  std::vector<InequalityCheck> checks;
  bool all_pass = false;
};

/// Evaluates every lemma and the final bound on the instance. The clamped
/// estimate is not band-limited in the first R eigenvectors, so the
/// coefficient quantities use the full unnormalized eigenbases and the
/// effective band limit is the last index carrying a nonzero coefficient
/// (at least R). Throws UnreachableNodes.
BoundReport theorem1_bound(const TheoremInstance& instance);

struct InstanceOptions {
  ManifoldFamily family = ManifoldFamily::Rotation;
  double scale = 1.5;
  double kernel_width = 0.3;
  Index nodes = 100;
  Index neighbors = 8;
  Index target_labels = 10;
  Index basis_size = 10;
  double mu = 1.0;
  std::uint64_t seed = 1;
};

/// Paired sample, k-NN kernel graphs with the spec's width, the label
/// function sign(gamma_1 - 1/2) on both domains, and a clamped-ready SDA
/// estimate from the normalized-Laplacian solver. The lowest node of any
/// target component without a label is added to the labeled set.
TheoremInstance make_theorem_instance(const InstanceOptions& options);

}  // namespace graphda
