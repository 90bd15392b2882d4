#include "graphda/theory.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "graphda/data.hpp"
#include "graphda/sda.hpp"
#include "graphda/spectral.hpp"

namespace graphda {

namespace {

constexpr double kCheckTolerance = 1e-8;

InequalityCheck make_check(std::string name, double lhs, double rhs, double tol) {
  return {std::move(name), lhs, rhs, lhs <= rhs + tol};
}

std::vector<std::vector<Index>> neighbor_sets(const WeightMatrix& w) {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(w.size()));
  for (const auto& e : w.edges()) {
    out[static_cast<std::size_t>(e.i)].push_back(e.j);
    out[static_cast<std::size_t>(e.j)].push_back(e.i);
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

}  // namespace

LayerDecomposition layer_decomposition(const WeightMatrix& w, std::span<const Index> labeled) {
  const Index n = w.size();
  LayerDecomposition d;
  d.hop.assign(static_cast<std::size_t>(n), -1);
  const auto adj = w.adjacency();
  std::deque<Index> queue;
  for (Index i : labeled) {
    if (i < 0 || i >= n) throw IndexOutOfRange(i, n);
    if (d.hop[static_cast<std::size_t>(i)] == 0) continue;
    d.hop[static_cast<std::size_t>(i)] = 0;
    queue.push_back(i);
  }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (const auto& nb : adj[static_cast<std::size_t>(u)]) {
      auto& h = d.hop[static_cast<std::size_t>(nb.node)];
      if (h < 0) {
        h = d.hop[static_cast<std::size_t>(u)] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  std::vector<Index> unreachable;
  Index depth = 0;
  for (Index i = 0; i < n; ++i) {
    const Index h = d.hop[static_cast<std::size_t>(i)];
    if (h < 0) unreachable.push_back(i);
    depth = std::max(depth, h);
  }
  if (!unreachable.empty()) throw UnreachableNodes(std::move(unreachable));
  d.layers.resize(static_cast<std::size_t>(depth + 1));
  for (Index i = 0; i < n; ++i) d.layers[static_cast<std::size_t>(d.hop[static_cast<std::size_t>(i)])].push_back(i);
  return d;
}

LayerStats layer_stats(const LayerDecomposition& decomposition, const WeightMatrix& w) {
  const auto q_count = decomposition.layers.size();
  LayerStats s;
  s.k_min.assign(q_count, 0);
  s.k_max.assign(q_count, 0);
  s.w_min_layer.assign(q_count, 0.0);
  const auto adj = w.adjacency();
  const auto& hop = decomposition.hop;
  for (std::size_t q = 0; q < q_count; ++q) {
    Index kmin = std::numeric_limits<Index>::max();
    Index kmax = 0;
    double wmin = std::numeric_limits<double>::infinity();
    for (Index j : decomposition.layers[q]) {
      Index below = 0;
      Index above = 0;
      for (const auto& nb : adj[static_cast<std::size_t>(j)]) {
        const Index h = hop[static_cast<std::size_t>(nb.node)];
        if (h == static_cast<Index>(q) - 1) {
          ++below;
          wmin = std::min(wmin, nb.weight);
        } else if (h == static_cast<Index>(q) + 1) {
          ++above;
        }
      }
      kmin = std::min(kmin, below);
      kmax = std::max(kmax, above);
    }
    s.k_max[q] = kmax;
    if (q >= 1) {
      s.k_min[q] = kmin;
      s.w_min_layer[q] = wmin;
    }
  }
  if (q_count > 1) {
    s.w_min = *std::min_element(s.w_min_layer.begin() + 1, s.w_min_layer.end());
  }
  return s;
}

double compute_kappa(const LayerStats& stats, const LayerDecomposition& decomposition) {
  const Index depth = decomposition.depth();
  auto size = [&](Index q) { return static_cast<double>(decomposition.layers[static_cast<std::size_t>(q)].size()); };
  auto kmin = [&](Index q) { return static_cast<double>(stats.k_min[static_cast<std::size_t>(q)]); };
  auto kmax = [&](Index q) { return static_cast<double>(stats.k_max[static_cast<std::size_t>(q)]); };
  double kappa = 0.0;
  for (Index q = 1; q <= depth; ++q) {
    double inner = 1.0;
    for (Index l = 1; l <= q - 1; ++l) {
      double prod = 1.0;
      for (Index m = l; m <= q - 1; ++m) prod *= size(m) * kmax(m) / kmin(m);
      inner += prod;
    }
    kappa += size(q) / kmin(q) * inner;
  }
  return kappa;
}

Lemma1Result check_lemma1(const Eigen::VectorXd& alpha_source, const Eigen::VectorXd& alpha_target,
                          const Eigen::VectorXd& lambda_source, const Eigen::VectorXd& lambda_target) {
  const Index r = alpha_source.size();
  if (alpha_target.size() != r || lambda_source.size() != r || lambda_target.size() != r || r == 0) {
    throw std::invalid_argument("check_lemma1: all inputs need the same nonzero length R");
  }
  Lemma1Result out;
  const double es = (lambda_source.array() * alpha_source.array().square()).sum();
  const double et = (lambda_target.array() * alpha_target.array().square()).sum();
  out.c = std::max(alpha_source.norm(), alpha_target.norm());
  out.delta = (lambda_source - lambda_target).cwiseAbs().maxCoeff();
  out.delta_alpha = (alpha_source - alpha_target).norm();
  // lambda_R bounds every |lambda_k|; for ascending nonnegative spectra this is the last entry.
  out.lambda_r = std::max(lambda_source.cwiseAbs().maxCoeff(), lambda_target.cwiseAbs().maxCoeff());
  const double rhs = out.c * out.c * out.delta + 2.0 * out.c * out.lambda_r * out.delta_alpha;
  out.check = make_check("lemma1", std::abs(es - et), rhs, 1e-10);
  return out;
}

Lemma2Result check_lemma2(const ManifoldSpec& spec, const PairedSample& sample,
                          const WeightMatrix& source, const WeightMatrix& target) {
  const Index n = sample.gamma.rows();
  if (source.size() != n || target.size() != n) {
    throw std::invalid_argument("check_lemma2: graphs must be built on the paired sample");
  }
  Lemma2Result r;
  r.lambda_source = all_eigenvalues(laplacian(source));
  r.lambda_target = all_eigenvalues(laplacian(target));
  r.delta_observed = (r.lambda_source - r.lambda_target).cwiseAbs().maxCoeff();

  for (const WeightMatrix* w : {&source, &target}) {
    for (const auto& e : w->edges()) {
      r.epsilon_gamma = std::max(r.epsilon_gamma, (sample.gamma.row(e.i) - sample.gamma.row(e.j)).norm());
    }
  }
  r.delta_w = spec.kernel_lipschitz() * (spec.a() * spec.m_source + spec.m_source + spec.m_target) *
              r.epsilon_gamma;

  const auto ns = neighbor_sets(source);
  const auto nt = neighbor_sets(target);
  r.beta_source.resize(n);
  r.beta_target.resize(n);
  const double phi0 = spec.kernel_peak();
  for (Index i = 0; i < n; ++i) {
    const auto& a = ns[static_cast<std::size_t>(i)];
    const auto& b = nt[static_cast<std::size_t>(i)];
    std::vector<Index> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const auto ks = static_cast<Index>(a.size());
    const auto kt = static_cast<Index>(b.size());
    r.k_source.push_back(ks);
    r.k_target.push_back(kt);
    const double bs = ks > 0 ? static_cast<double>(common.size()) / static_cast<double>(ks) : 1.0;
    const double bt = kt > 0 ? static_cast<double>(common.size()) / static_cast<double>(kt) : 1.0;
    r.beta_source(i) = bs;
    r.beta_target(i) = bt;
    const double term = 2.0 * (bs * static_cast<double>(ks) * r.delta_w +
                               (1.0 - bs) * static_cast<double>(ks) * phi0 +
                               (1.0 - bt) * static_cast<double>(kt) * phi0);
    r.rho_max = std::max(r.rho_max, term);
  }
  r.check = make_check("lemma2", r.delta_observed, r.rho_max, kCheckTolerance);
  return r;
}

Eigen::VectorXd clamp_to_labels(const Eigen::VectorXd& f_hat, const Eigen::VectorXd& f,
                                std::span<const Index> labeled) {
  if (f_hat.size() != f.size()) throw std::invalid_argument("clamp_to_labels: size mismatch");
  Eigen::VectorXd out = f_hat;
  for (Index i : labeled) {
    if (i < 0 || i >= f.size()) throw IndexOutOfRange(i, f.size());
    out(i) = f(i);
  }
  return out;
}

std::vector<Lemma3Layer> check_lemma3(const WeightMatrix& w, const Eigen::VectorXd& f,
                                      const Eigen::VectorXd& f_hat,
                                      const LayerDecomposition& decomposition,
                                      const LayerStats& stats) {
  const Index n = w.size();
  if (f.size() != n || f_hat.size() != n || static_cast<Index>(decomposition.hop.size()) != n) {
    throw std::invalid_argument("check_lemma3: size mismatch");
  }
  const Eigen::VectorXd g = clamp_to_labels(f_hat, f, decomposition.layers.front());
  const Index depth = decomposition.depth();
  std::vector<double> b(static_cast<std::size_t>(depth + 1), 0.0);
  std::vector<double> b_hat(static_cast<std::size_t>(depth + 1), 0.0);
  for (const auto& e : w.edges()) {
    const Index hi = decomposition.hop[static_cast<std::size_t>(e.i)];
    const Index hj = decomposition.hop[static_cast<std::size_t>(e.j)];
    if (std::abs(hi - hj) != 1) continue;
    const auto q = static_cast<std::size_t>(std::max(hi, hj));
    b[q] += e.weight * (f(e.i) - f(e.j)) * (f(e.i) - f(e.j));
    b_hat[q] += e.weight * (g(e.i) - g(e.j)) * (g(e.i) - g(e.j));
  }
  std::vector<double> err(static_cast<std::size_t>(depth + 1), 0.0);
  for (Index q = 0; q <= depth; ++q) {
    for (Index i : decomposition.layers[static_cast<std::size_t>(q)]) {
      err[static_cast<std::size_t>(q)] += (g(i) - f(i)) * (g(i) - f(i));
    }
  }
  std::vector<Lemma3Layer> out;
  for (Index q = 1; q <= depth; ++q) {
    const auto uq = static_cast<std::size_t>(q);
    const double size = static_cast<double>(decomposition.layers[uq].size());
    const double wq = stats.w_min_layer[uq];
    const double inner = std::sqrt(b[uq] / wq) + std::sqrt(b_hat[uq] / wq) +
                         std::sqrt(static_cast<double>(stats.k_max[uq - 1])) * std::sqrt(err[uq - 1]);
    const double rhs = size / static_cast<double>(stats.k_min[uq]) * inner * inner;
    Lemma3Layer layer;
    layer.layer = q;
    layer.b = b[uq];
    layer.b_hat = b_hat[uq];
    layer.check = make_check("lemma3_layer" + std::to_string(q), err[uq], rhs, kCheckTolerance);
    out.push_back(layer);
  }
  return out;
}

BoundReport theorem1_bound(const TheoremInstance& in) {
  const Index n = in.sample.gamma.rows();
  if (in.source_weights.size() != n || in.target_weights.size() != n || in.source_truth.size() != n ||
      in.target_truth.size() != n || in.target_estimate.size() != n) {
    throw std::invalid_argument("theorem1_bound: every input must cover the paired sample");
  }
  if (in.basis_size < 1 || in.basis_size > n) throw std::invalid_argument("theorem1_bound: R outside [1, n]");

  BoundReport rep;
  const auto decomposition = layer_decomposition(in.target_weights, in.target_labeled);
  const auto stats = layer_stats(decomposition, in.target_weights);
  rep.depth = decomposition.depth();
  for (const auto& layer : decomposition.layers) rep.layer_sizes.push_back(static_cast<Index>(layer.size()));
  rep.k_min = stats.k_min;
  rep.k_max = stats.k_max;
  rep.w_min_layer = stats.w_min_layer;
  rep.w_min = stats.w_min;
  rep.kappa = compute_kappa(stats, decomposition);
  rep.fully_labeled = rep.depth == 0;

  const Eigen::VectorXd f_hat = clamp_to_labels(in.target_estimate, in.target_truth, decomposition.layers.front());
  rep.error = (f_hat - in.target_truth).squaredNorm();

  const Lemma2Result l2 = check_lemma2(in.spec, in.sample, in.source_weights, in.target_weights);
  rep.a = in.spec.a();
  rep.m_source = in.spec.m_source;
  rep.m_target = in.spec.m_target;
  rep.kernel_lipschitz = in.spec.kernel_lipschitz();
  rep.kernel_peak = in.spec.kernel_peak();
  rep.epsilon_gamma = l2.epsilon_gamma;
  rep.delta_w = l2.delta_w;
  rep.rho_max = l2.rho_max;
  rep.delta_observed = l2.delta_observed;

  const LaplacianMatrix ls = laplacian(in.source_weights);
  const LaplacianMatrix lt = laplacian(in.target_weights);
  const SpectralBasis us = smallest_eigenpairs(ls, n);
  const SpectralBasis ut = smallest_eigenpairs(lt, n);
  const Eigen::VectorXd alpha_s = gft(us, in.source_truth);
  const Eigen::VectorXd alpha_t = gft(ut, f_hat);
  const double scale = std::max({1.0, alpha_s.norm(), alpha_t.norm()});
  Index last = 0;
  for (Index k = 0; k < n; ++k) {
    if (std::abs(alpha_s(k)) > 1e-12 * scale || std::abs(alpha_t(k)) > 1e-12 * scale) last = k + 1;
  }
  rep.basis_size = in.basis_size;
  rep.effective_basis_size = std::max(in.basis_size, last);
  const Index r = rep.effective_basis_size;
  const Lemma1Result l1 = check_lemma1(alpha_s.head(r), alpha_t.head(r), us.eigenvalues.head(r),
                                       ut.eigenvalues.head(r));
  rep.c = l1.c;
  rep.delta = l1.delta;
  rep.delta_alpha = l1.delta_alpha;
  rep.lambda_r = l1.lambda_r;

  rep.b = dirichlet_energy(lt, in.target_truth);
  rep.source_energy = dirichlet_energy(ls, in.source_truth);
  rep.b_hat = rep.source_energy + rep.c * rep.c * rep.rho_max + 2.0 * rep.c * rep.lambda_r * rep.delta_alpha;
  rep.b_hat_observed = dirichlet_energy(lt, f_hat);

  rep.checks.push_back(l1.check);
  rep.checks.push_back(l2.check);
  rep.checks.push_back(make_check("variation_bound", rep.b_hat_observed, rep.b_hat, kCheckTolerance));
  rep.layers = check_lemma3(in.target_weights, in.target_truth, in.target_estimate, decomposition, stats);
  for (const auto& layer : rep.layers) rep.checks.push_back(layer.check);

  if (rep.fully_labeled) {
    rep.bound = 0.0;
    rep.checks.push_back({"lemma4", rep.error, 0.0, rep.error == 0.0});
    rep.checks.push_back({"theorem1", rep.error, 0.0, rep.error == 0.0});
  } else {
    const double observed = std::sqrt(rep.b) + std::sqrt(rep.b_hat_observed);
    const double full = std::sqrt(rep.b) + std::sqrt(rep.b_hat);
    rep.checks.push_back(make_check("lemma4", rep.error, rep.kappa / rep.w_min * observed * observed,
                                    kCheckTolerance));
    rep.bound = rep.kappa / rep.w_min * full * full;
    rep.checks.push_back(make_check("theorem1", rep.error, rep.bound, kCheckTolerance));
  }
  rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const auto& c) { return c.pass; });
  return rep;
}

TheoremInstance make_theorem_instance(const InstanceOptions& o) {
  if (o.target_labels < 1 || o.target_labels > o.nodes) {
    throw std::invalid_argument("target label count outside [1, n]");
  }
  TheoremInstance in;
  in.spec = make_manifold_spec(o.family, o.scale, o.kernel_width, o.seed);
  in.sample = generate_paired_manifolds(in.spec, o.nodes, o.seed);
  in.source_weights = build_knn_graph(in.sample.source, o.neighbors, o.kernel_width);
  in.target_weights = build_knn_graph(in.sample.target, o.neighbors, o.kernel_width);
  in.basis_size = o.basis_size;

  const Index n = o.nodes;
  in.source_truth.resize(n);
  for (Index i = 0; i < n; ++i) in.source_truth(i) = in.sample.gamma(i, 0) >= 0.5 ? 1.0 : -1.0;
  in.target_truth = in.source_truth;

  in.target_labeled = random_subset(n, o.target_labels, o.seed);
  const auto comp = connected_components(in.target_weights);
  std::vector<bool> covered(static_cast<std::size_t>(component_count(comp)), false);
  for (Index i : in.target_labeled) covered[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = true;
  for (Index i = 0; i < n; ++i) {
    auto c = static_cast<std::size_t>(comp[static_cast<std::size_t>(i)]);
    if (!covered[c]) {
      covered[c] = true;
      in.target_labeled.push_back(i);
    }
  }
  std::sort(in.target_labeled.begin(), in.target_labeled.end());

  const SpectralBasis bs = smallest_eigenpairs(normalized_laplacian(in.source_weights), o.basis_size);
  const SpectralBasis bt = smallest_eigenpairs(normalized_laplacian(in.target_weights), o.basis_size);
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  Eigen::VectorXd yt(static_cast<Index>(in.target_labeled.size()));
  for (std::size_t k = 0; k < in.target_labeled.size(); ++k) yt(static_cast<Index>(k)) = in.target_truth(in.target_labeled[k]);
  const CoefficientPair coef = solve_coefficients(bs, bt, all, in.target_labeled, in.source_truth, yt, o.mu);
  in.target_estimate = igft(bt, Eigen::VectorXd(coef.target.col(0)));
  return in;
}

}  // namespace graphda
