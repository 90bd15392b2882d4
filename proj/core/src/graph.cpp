#include "graphda/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace graphda {

namespace {

bool edge_less(const Edge& a, const Edge& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

// Squared distances from row i to every other row, ties resolved by index.
std::vector<Index> nearest(const Eigen::MatrixXd& points, Index i, Index k,
                           std::vector<double>& sq_dist) {
  const Index n = points.rows();
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n - 1));
  for (Index j = 0; j < n; ++j) {
    sq_dist[static_cast<std::size_t>(j)] = (points.row(i) - points.row(j)).squaredNorm();
    if (j != i) order.push_back(j);
  }
  auto closer = [&](Index a, Index b) {
    const double da = sq_dist[static_cast<std::size_t>(a)];
    const double db = sq_dist[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
  order.resize(static_cast<std::size_t>(k));
  return order;
}

void check_knn_args(const Eigen::MatrixXd& points, Index k) {
  const Index n = points.rows();
  if (n < 2) throw std::invalid_argument("build_knn_graph: need at least 2 points");
  if (k < 1 || k >= n) {
    throw std::invalid_argument("build_knn_graph: K must satisfy 1 <= K < n (K=" +
                                std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  if (!points.allFinite()) throw std::invalid_argument("build_knn_graph: non-finite coordinates");
}

}  // namespace

WeightMatrix::WeightMatrix(Index n) : n_(n) {
  if (n < 0) throw std::invalid_argument("WeightMatrix: negative size");
}

WeightMatrix WeightMatrix::from_edges(Index n, std::vector<Edge> edges) {
  WeightMatrix w(n);
  w.edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.i == e.j) throw std::invalid_argument("WeightMatrix: self-loop at " + std::to_string(e.i));
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw std::invalid_argument("WeightMatrix: edge endpoint out of range");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw std::invalid_argument("WeightMatrix: weights must be finite and nonnegative");
    }
    if (e.weight == 0.0) continue;
    if (e.i > e.j) std::swap(e.i, e.j);
    w.edges_.push_back(e);
  }
  std::sort(w.edges_.begin(), w.edges_.end(), edge_less);
  for (std::size_t k = 1; k < w.edges_.size(); ++k) {
    if (w.edges_[k].i == w.edges_[k - 1].i && w.edges_[k].j == w.edges_[k - 1].j) {
      throw std::invalid_argument("WeightMatrix: duplicate edge (" + std::to_string(w.edges_[k].i) +
                                  "," + std::to_string(w.edges_[k].j) + ")");
    }
  }
  return w;
}

double WeightMatrix::weight(Index i, Index j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  const Edge key{i, j, 0.0};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key, edge_less);
  return (it != edges_.end() && it->i == i && it->j == j) ? it->weight : 0.0;
}

std::vector<std::vector<Neighbor>> WeightMatrix::adjacency() const {
  std::vector<std::vector<Neighbor>> adj(static_cast<std::size_t>(n_));
  for (const Edge& e : edges_) {
    adj[static_cast<std::size_t>(e.i)].push_back({e.j, e.weight});
    adj[static_cast<std::size_t>(e.j)].push_back({e.i, e.weight});
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  return adj;
}

Eigen::MatrixXd WeightMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (const Edge& e : edges_) {
    m(e.i, e.j) = e.weight;
    m(e.j, e.i) = e.weight;
  }
  return m;
}

bool operator==(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.n_ != b.n_ || a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t k = 0; k < a.edges_.size(); ++k) {
    const Edge& x = a.edges_[k];
    const Edge& y = b.edges_[k];
    if (x.i != y.i || x.j != y.j || x.weight != y.weight) return false;
  }
  return true;
}

double auto_kernel_width(const Eigen::MatrixXd& points, Index k) {
  check_knn_args(points, k);
  const Index n = points.rows();
  std::vector<double> sq(static_cast<std::size_t>(n));
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j : nearest(points, i, k, sq)) total += std::sqrt(sq[static_cast<std::size_t>(j)]);
  }
  return total / static_cast<double>(n * k);
}

WeightMatrix build_knn_graph(const Eigen::MatrixXd& points, Index k, std::optional<double> sigma) {
  check_knn_args(points, k);
  if (sigma && !(*sigma > 0.0 && std::isfinite(*sigma))) {
    throw std::invalid_argument("build_knn_graph: sigma must be positive");
  }
  const Index n = points.rows();
  std::vector<double> sq(static_cast<std::size_t>(n));
  std::vector<Edge> selected;
  selected.reserve(static_cast<std::size_t>(n * k));
  double dist_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j : nearest(points, i, k, sq)) {
      const double d2 = sq[static_cast<std::size_t>(j)];
      dist_sum += std::sqrt(d2);
      selected.push_back({std::min(i, j), std::max(i, j), d2});
    }
  }
  // Union symmetrization: keep one copy of each pair.
  std::sort(selected.begin(), selected.end(), edge_less);
  selected.erase(std::unique(selected.begin(), selected.end(),
                             [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }),
                 selected.end());

  const double width = sigma ? *sigma : dist_sum / static_cast<double>(n * k);
  for (Edge& e : selected) {
    // Zero distance maps to the kernel peak even when the auto width degenerates to 0.
    e.weight = e.weight == 0.0 ? 1.0 : std::exp(-e.weight / (width * width));
  }
  // Underflowed weights vanish from the edge list.
  return WeightMatrix::from_edges(n, std::move(selected));
}

DegreeVector degree_vector(const WeightMatrix& w) {
  DegreeVector d = DegreeVector::Zero(w.size());
  const auto adj = w.adjacency();
  for (Index i = 0; i < w.size(); ++i) {
    double sum = 0.0;
    for (const Neighbor& nb : adj[static_cast<std::size_t>(i)]) sum += nb.weight;
    d(i) = sum;
  }
  return d;
}

LaplacianMatrix laplacian(const WeightMatrix& w) {
  LaplacianMatrix l = -w.dense();
  const DegreeVector d = degree_vector(w);
  l.diagonal() = d;
  return l;
}

LaplacianMatrix normalized_laplacian(const WeightMatrix& w) {
  const DegreeVector d = degree_vector(w);
  for (Index i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0) throw IsolatedNode(i);
  }
  const Eigen::VectorXd inv_sqrt = d.cwiseSqrt().cwiseInverse();
  LaplacianMatrix l = LaplacianMatrix::Identity(w.size(), w.size());
  for (const Edge& e : w.edges()) {
    const double v = -e.weight * inv_sqrt(e.i) * inv_sqrt(e.j);
    l(e.i, e.j) = v;
    l(e.j, e.i) = v;
  }
  return l;
}

double dirichlet_energy(const LaplacianMatrix& l, const Eigen::VectorXd& f) {
  if (l.rows() != l.cols() || l.rows() != f.size()) {
    throw std::invalid_argument("dirichlet_energy: dimension mismatch");
  }
  return f.dot(l * f);
}

double edge_variation(const WeightMatrix& w, const Eigen::VectorXd& f) {
  if (f.size() != w.size()) throw std::invalid_argument("edge_variation: dimension mismatch");
  double sum = 0.0;
  for (const Edge& e : w.edges()) {
    const double diff = f(e.i) - f(e.j);
    sum += e.weight * diff * diff;
  }
  return sum;
}

WeightMatrix prune_edges(const WeightMatrix& w, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("prune_edges: threshold must be >= 0");
  std::vector<Edge> kept;
  kept.reserve(w.edges().size());
  for (const Edge& e : w.edges()) {
    if (e.weight >= threshold) kept.push_back(e);
  }
  return WeightMatrix::from_edges(w.size(), std::move(kept));
}

std::vector<Index> connected_components(const WeightMatrix& w) {
  const auto adj = w.adjacency();
  std::vector<Index> label(static_cast<std::size_t>(w.size()), -1);
  Index next = 0;
  std::queue<Index> frontier;
  for (Index s = 0; s < w.size(); ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = next;
    frontier.push(s);
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (const Neighbor& nb : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(nb.node)] < 0) {
          label[static_cast<std::size_t>(nb.node)] = next;
          frontier.push(nb.node);
        }
      }
    }
    ++next;
  }
  return label;
}

Index component_count(std::span<const Index> labels) {
  Index count = 0;
  for (Index l : labels) count = std::max(count, l + 1);
  return count;
}

}  // namespace graphda
