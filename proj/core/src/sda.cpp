#include "graphda/sda.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace graphda {

namespace {

constexpr double kMaxCondition = 1e12;

void check_index_list(std::span<const Index> idx, Index n, const char* what) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= n) throw IndexOutOfRange(idx[k], n);
    if (k > 0 && idx[k] <= idx[k - 1]) {
      throw std::invalid_argument(std::string(what) + ": labeled indices must be sorted and unique");
    }
  }
}

// Rows of U restricted to the labeled nodes: S U.
Eigen::MatrixXd select_rows(const Eigen::MatrixXd& u, std::span<const Index> rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), u.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = u.row(rows[k]);
  return out;
}

void check_shapes(const SpectralBasis& source, const SpectralBasis& target,
                  std::span<const Index> source_labeled, std::span<const Index> target_labeled,
                  const Eigen::MatrixXd& source_y, const Eigen::MatrixXd& target_y) {
  if (source.size() != target.size()) {
    throw std::invalid_argument("solve_coefficients: bases must have the same size R");
  }
  check_index_list(source_labeled, source.nodes(), "source");
  check_index_list(target_labeled, target.nodes(), "target");
  if (source_y.rows() != static_cast<Index>(source_labeled.size()) ||
      target_y.rows() != static_cast<Index>(target_labeled.size()) ||
      source_y.cols() != target_y.cols()) {
    throw std::invalid_argument("solve_coefficients: label matrix shape mismatch");
  }
}

}  // namespace

void LabelProblem::validate() const {
  if (class_count < 2) throw std::invalid_argument("LabelProblem: need at least 2 classes");
  if (source_points.rows() < 2 || target_points.rows() < 2) {
    throw std::invalid_argument("LabelProblem: each domain needs at least 2 samples");
  }
  if (source_points.cols() != target_points.cols()) {
    throw std::invalid_argument("LabelProblem: source and target dimensions differ");
  }
  auto check = [&](const std::vector<Index>& idx, const std::vector<int>& labels, Index n,
                   const char* name) {
    if (idx.empty()) throw std::invalid_argument(std::string("LabelProblem: no ") + name + " labels");
    if (idx.size() != labels.size()) {
      throw std::invalid_argument(std::string("LabelProblem: ") + name + " label count mismatch");
    }
    check_index_list(idx, n, name);
    for (int c : labels) {
      if (c < 0 || c >= class_count) {
        throw std::invalid_argument(std::string("LabelProblem: ") + name + " class out of range");
      }
    }
  };
  check(source_labeled, source_labels, source_size(), "source");
  check(target_labeled, target_labels, target_size(), "target");
}

Eigen::MatrixXd one_hot(std::span<const int> classes, int class_count) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Index>(classes.size()), class_count);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k] < 0 || classes[k] >= class_count) throw std::invalid_argument("one_hot: class out of range");
    y(static_cast<Index>(k), classes[k]) = 1.0;
  }
  return y;
}

CoefficientPair solve_coefficients(const SpectralBasis& source, const SpectralBasis& target,
                                   std::span<const Index> source_labeled,
                                   std::span<const Index> target_labeled,
                                   const Eigen::MatrixXd& source_y, const Eigen::MatrixXd& target_y,
                                   double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("solve_coefficients: mu must be > 0");
  check_shapes(source, target, source_labeled, target_labeled, source_y, target_y);

  const Eigen::MatrixXd su = select_rows(source.eigenvectors, source_labeled);
  const Eigen::MatrixXd tu = select_rows(target.eigenvectors, target_labeled);
  const Eigen::MatrixXd as = su.transpose() * su;  // U_s^T S_s^T S_s U_s
  const Eigen::MatrixXd at = tu.transpose() * tu;
  const Eigen::MatrixXd bs_y = su.transpose() * source_y;  // B_s y_s, one column per class
  const Eigen::MatrixXd bt_y = tu.transpose() * target_y;
  const double inv_mu = 1.0 / mu;

  const Eigen::MatrixXd system = inv_mu * at * as + at + as;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) {
    throw SingularSystem(rcond > 0.0 ? 1.0 / rcond : INFINITY);
  }

  CoefficientPair out;
  out.source = lu.solve(inv_mu * at * bs_y + bs_y + bt_y);
  out.target = inv_mu * as * out.source + out.source - inv_mu * bs_y;
  if (!out.source.allFinite() || !out.target.allFinite()) throw SingularSystem(INFINITY);
  return out;
}

double sda_objective(const SpectralBasis& source, const SpectralBasis& target,
                     std::span<const Index> source_labeled, std::span<const Index> target_labeled,
                     const Eigen::MatrixXd& source_y, const Eigen::MatrixXd& target_y, double mu,
                     const CoefficientPair& c) {
  check_shapes(source, target, source_labeled, target_labeled, source_y, target_y);
  const Eigen::MatrixXd rs = select_rows(source.eigenvectors, source_labeled) * c.source - source_y;
  const Eigen::MatrixXd rt = select_rows(target.eigenvectors, target_labeled) * c.target - target_y;
  return rs.squaredNorm() + rt.squaredNorm() + mu * (c.source - c.target).squaredNorm();
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& estimate) {
  std::vector<int> out(static_cast<std::size_t>(estimate.rows()), 0);
  for (Index i = 0; i < estimate.rows(); ++i) {
    int best = 0;
    for (Index c = 1; c < estimate.cols(); ++c) {
      if (estimate(i, c) > estimate(i, best)) best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::vector<int> predict_labels(const SpectralBasis& basis, const Eigen::MatrixXd& alpha) {
  return argmax_rows(igft(basis, alpha));
}

}  // namespace graphda
