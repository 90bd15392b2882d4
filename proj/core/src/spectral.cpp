#include "graphda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace graphda {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kSignTol = 1e-12;
constexpr double kClusterWidth = 1e-10;
constexpr double kPivotTol = 1e-8;

void require_symmetric(const LaplacianMatrix& l) {
  if (l.rows() != l.cols()) throw std::invalid_argument("eigensolver: matrix is not square");
  if (!l.allFinite()) throw std::invalid_argument("eigensolver: non-finite entries");
  const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
  if ((l - l.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw std::invalid_argument("eigensolver: matrix is not symmetric");
  }
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kSignTol) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

// Replaces the columns of a degenerate block with a basis that depends only on
// the spanned subspace: Gram-Schmidt on the projections P e_0, P e_1, ...
void canonicalize_block(Eigen::Ref<Eigen::MatrixXd> block) {
  const Index n = block.rows();
  const Index m = block.cols();
  Eigen::MatrixXd q(m, m);
  Index found = 0;
  for (Index i = 0; i < n && found < m; ++i) {
    Eigen::VectorXd c = block.row(i).transpose();
    for (Index k = 0; k < found; ++k) c -= q.col(k).dot(c) * q.col(k);
    const double norm = c.norm();
    if (norm <= kPivotTol) continue;
    q.col(found++) = c / norm;
  }
  if (found < m) return;
  block = (block * q).eval();
}

}  // namespace

SpectralBasis smallest_eigenpairs(const LaplacianMatrix& l, Index r) {
  require_symmetric(l);
  const Index n = l.rows();
  if (r < 1 || r > n) throw std::invalid_argument("smallest_eigenpairs: R out of range");

  // Tridiagonalization + implicit symmetric QR; only the lower triangle is read.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error("eigensolver did not converge");
  Eigen::VectorXd values = solver.eigenvalues();
  Eigen::MatrixXd vectors = solver.eigenvectors();
  for (Index k = 0; k < n; ++k) fix_sign(vectors.col(k));

  // Reorder within clusters of numerically equal eigenvalues.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && values(end) - values(end - 1) <= kClusterWidth) ++end;
    if (end - start > 1) {
      canonicalize_block(vectors.middleCols(start, end - start));
      for (Index k = start; k < end; ++k) fix_sign(vectors.col(k));
      std::sort(order.begin() + start, order.begin() + end, [&](Index a, Index b) {
        const Eigen::VectorXd va = vectors.col(a);
        const Eigen::VectorXd vb = vectors.col(b);
        return lexicographically_less(va, vb);
      });
    }
    start = end;
  }

  SpectralBasis basis;
  basis.eigenvalues.resize(r);
  basis.eigenvectors.resize(n, r);
  for (Index k = 0; k < r; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    basis.eigenvalues(k) = values(k);  // equal within a cluster; keep them ascending
    basis.eigenvectors.col(k) = vectors.col(src);
  }
  return basis;
}

Eigen::VectorXd all_eigenvalues(const LaplacianMatrix& l) {
  require_symmetric(l);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigensolver did not converge");
  return solver.eigenvalues();
}

Eigen::VectorXd gft(const SpectralBasis& basis, const Eigen::VectorXd& f) {
  if (f.size() != basis.nodes()) throw std::invalid_argument("gft: dimension mismatch");
  return basis.eigenvectors.transpose() * f;
}

Eigen::MatrixXd gft(const SpectralBasis& basis, const Eigen::MatrixXd& f) {
  if (f.rows() != basis.nodes()) throw std::invalid_argument("gft: dimension mismatch");
  return basis.eigenvectors.transpose() * f;
}

Eigen::VectorXd igft(const SpectralBasis& basis, const Eigen::VectorXd& alpha) {
  if (alpha.size() != basis.size()) throw std::invalid_argument("igft: dimension mismatch");
  return basis.eigenvectors * alpha;
}

Eigen::MatrixXd igft(const SpectralBasis& basis, const Eigen::MatrixXd& alpha) {
  if (alpha.rows() != basis.size()) throw std::invalid_argument("igft: dimension mismatch");
  return basis.eigenvectors * alpha;
}

}  // namespace graphda
