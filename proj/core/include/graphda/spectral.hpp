#pragma once

#include <Eigen/Core>

#include "graphda/graph.hpp"

namespace graphda {

/// The R smallest eigenpairs of a symmetric (Laplacian) matrix.
///
/// Eigenvalues ascend; eigenvectors are orthonormal columns. Each column is
/// sign-fixed so that its first entry with magnitude above 1e-12 is positive.
/// Inside a cluster of eigenvalues within 1e-10 of each other the solver's
/// arbitrary rotation is replaced by Gram-Schmidt on the projections of
/// e_0, e_1, ... onto the eigenspace, then sign-fixed and ordered
/// lexicographically. For a graph with several components the zero
/// eigenspace thus comes out as scaled component indicators.
struct SpectralBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // n x R

  Index size() const noexcept { return eigenvalues.size(); }
  Index nodes() const noexcept { return eigenvectors.rows(); }
};

/// Throws std::invalid_argument if L is not symmetric (1e-12 relative) or R
/// is outside [1, n].
SpectralBasis smallest_eigenpairs(const LaplacianMatrix& l, Index r);

/// All eigenvalues of a symmetric matrix in ascending order.
Eigen::VectorXd all_eigenvalues(const LaplacianMatrix& l);

/// Graph Fourier transform alpha = U^T f. Columns of `f` are independent signals.
Eigen::VectorXd gft(const SpectralBasis& basis, const Eigen::VectorXd& f);
Eigen::MatrixXd gft(const SpectralBasis& basis, const Eigen::MatrixXd& f);

/// Band-limited reconstruction f = U alpha.
Eigen::VectorXd igft(const SpectralBasis& basis, const Eigen::VectorXd& alpha);
Eigen::MatrixXd igft(const SpectralBasis& basis, const Eigen::MatrixXd& alpha);

}  // namespace graphda
