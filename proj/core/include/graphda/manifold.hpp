#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "graphda/errors.hpp"

namespace graphda {

/// Built-in generator pairs over the parameter box Gamma = [0, 1]^2.
/// g_s(gamma) = (gamma_1, gamma_2, 0) in every family; g_t is g_s itself,
/// a fixed random rotation of it, or c * g_s.
enum class ManifoldFamily { Identity, Rotation, Scale };

std::string_view to_string(ManifoldFamily family);
/// Throws std::invalid_argument for unknown names.
ManifoldFamily parse_family(std::string_view name);

/// Generator pair with its analytic constants and the Gaussian kernel
/// phi(r) = exp(-r^2 / sigma^2) used to build both graphs.
struct ManifoldSpec {
  ManifoldFamily family = ManifoldFamily::Identity;
  double scale = 1.0;            // c for the Scale family
  double kernel_width = 0.3;     // sigma
  std::uint64_t rotation_seed = 0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Index parameter_dimension = 2;
  double m_source = 1.0;   // Lipschitz constant of g_s
  double m_target = 1.0;   // Lipschitz constant of g_t
  double a_lower = 1.0;    // inf |g_t(a) - g_t(b)| / |g_s(a) - g_s(b)|
  double a_upper = 1.0;    // sup of the same ratio

  double a() const noexcept;
  /// max |phi'(r)| = sqrt(2) e^{-1/2} / sigma.
  double kernel_lipschitz() const noexcept;
  double kernel_peak() const noexcept { return 1.0; }

  Eigen::Vector3d source_map(const Eigen::Vector2d& gamma) const;
  Eigen::Vector3d target_map(const Eigen::Vector2d& gamma) const;
};

/// Fills in the analytic constants (and the rotation drawn from
/// rotation_seed for the Rotation family).
ManifoldSpec make_manifold_spec(ManifoldFamily family, double scale, double kernel_width,
                                std::uint64_t rotation_seed = 0);

/// Proper orthogonal 3x3 matrix from a seed (Gram-Schmidt on Gaussian columns).
Eigen::Matrix3d random_rotation(std::uint64_t seed);

struct PairedSample {
  Eigen::MatrixXd gamma;   // n x 2
  Eigen::MatrixXd source;  // n x 3, rows g_s(gamma_i)
  Eigen::MatrixXd target;  // n x 3, rows g_t(gamma_i)
};

struct ObservedConstants {
  double m_source = 0.0;
  double m_target = 0.0;
  double a_lower = 0.0;
  double a_upper = 0.0;
};

/// Exhaustive scan of all pairs of the sample.
ObservedConstants scan_constants(const PairedSample& sample);

/// gamma_i uniform in [0, 1]^2. The analytic constants are checked against
/// an exhaustive pairwise scan of the sample; a mismatch throws Error.
PairedSample generate_paired_manifolds(const ManifoldSpec& spec, Index n, std::uint64_t seed);

}  // namespace graphda
