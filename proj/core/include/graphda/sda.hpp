#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "graphda/spectral.hpp"

namespace graphda {

/// Source/target samples with the known labels of each domain.
///
/// Labeled index lists are sorted and unique; labels[k] is the class of
/// node labeled[k]. Classes are 0-based and below class_count.
struct LabelProblem {
  Eigen::MatrixXd source_points;  // n_s x dim
  Eigen::MatrixXd target_points;  // n_t x dim
  int class_count = 2;
  std::vector<Index> source_labeled;
  std::vector<int> source_labels;
  std::vector<Index> target_labeled;
  std::vector<int> target_labels;

  Index source_size() const noexcept { return source_points.rows(); }
  Index target_size() const noexcept { return target_points.rows(); }

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

/// Reduced Fourier coefficients, one column per class.
struct CoefficientPair {
  Eigen::MatrixXd source;  // R x C
  Eigen::MatrixXd target;  // R x C
};

/// Rows are one-hot encodings of `classes`.
Eigen::MatrixXd one_hot(std::span<const int> classes, int class_count);

/// Closed-form minimizer of
///   |S_s U_s a_s - y_s|^2 + |S_t U_t a_t - y_t|^2 + mu |a_s - a_t|^2
/// solved independently for every label column. The selection matrices are
/// the row restrictions to the labeled index lists.
///
/// Throws SingularSystem when the R x R system has a condition estimate above 1e12.
CoefficientPair solve_coefficients(const SpectralBasis& source, const SpectralBasis& target,
                                   std::span<const Index> source_labeled,
                                   std::span<const Index> target_labeled,
                                   const Eigen::MatrixXd& source_y, const Eigen::MatrixXd& target_y,
                                   double mu);

/// Value of the coefficient objective above (summed over label columns).
double sda_objective(const SpectralBasis& source, const SpectralBasis& target,
                     std::span<const Index> source_labeled, std::span<const Index> target_labeled,
                     const Eigen::MatrixXd& source_y, const Eigen::MatrixXd& target_y, double mu,
                     const CoefficientPair& coefficients);

/// Row-wise argmax of a label estimate; ties go to the lower class.
std::vector<int> argmax_rows(const Eigen::MatrixXd& estimate);

/// Classes of U * alpha.
std::vector<int> predict_labels(const SpectralBasis& basis, const Eigen::MatrixXd& alpha);

}  // namespace graphda
