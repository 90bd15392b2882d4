#include "graphda/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "graphda/rng.hpp"

namespace graphda {

namespace {
constexpr std::uint64_t kGammaStream = 11;
constexpr std::uint64_t kRotationStream = 12;
constexpr double kScanTolerance = 1e-12;
}  // namespace

std::string_view to_string(ManifoldFamily family) {
  switch (family) {
    case ManifoldFamily::Identity: return "identity";
    case ManifoldFamily::Rotation: return "rotation";
    case ManifoldFamily::Scale: return "scale";
  }
  return "unknown";
}

ManifoldFamily parse_family(std::string_view name) {
  if (name == "identity") return ManifoldFamily::Identity;
  if (name == "rotation") return ManifoldFamily::Rotation;
  if (name == "scale") return ManifoldFamily::Scale;
  throw std::invalid_argument("unknown manifold family '" + std::string(name) + "'");
}

double ManifoldSpec::a() const noexcept {
  return std::max(std::abs(1.0 - a_lower), std::abs(a_upper - 1.0));
}

double ManifoldSpec::kernel_lipschitz() const noexcept {
  return std::sqrt(2.0) * std::exp(-0.5) / kernel_width;
}

Eigen::Vector3d ManifoldSpec::source_map(const Eigen::Vector2d& gamma) const {
  return {gamma(0), gamma(1), 0.0};
}

Eigen::Vector3d ManifoldSpec::target_map(const Eigen::Vector2d& gamma) const {
  const Eigen::Vector3d x = source_map(gamma);
  switch (family) {
    case ManifoldFamily::Identity: return x;
    case ManifoldFamily::Rotation: return rotation * x;
    case ManifoldFamily::Scale: return scale * x;
  }
  return x;
}

Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  auto rng = SplitMix64::stream(seed, kRotationStream);
  for (;;) {
    Eigen::Matrix3d g;
    for (Index c = 0; c < 3; ++c) {
      for (Index r = 0; r < 3; ++r) g(r, c) = rng.normal();
    }
    Eigen::Matrix3d q;
    bool ok = true;
    for (Index c = 0; c < 3 && ok; ++c) {
      Eigen::Vector3d v = g.col(c);
      for (Index p = 0; p < c; ++p) v -= q.col(p).dot(v) * q.col(p);
      const double norm = v.norm();
      if (norm < 1e-6) ok = false;
      else q.col(c) = v / norm;
    }
    if (!ok) continue;
    if (q.determinant() < 0.0) q.col(2) = -q.col(2);
    return q;
  }
}

ManifoldSpec make_manifold_spec(ManifoldFamily family, double scale, double kernel_width,
                                std::uint64_t rotation_seed) {
  if (!(kernel_width > 0.0) || !std::isfinite(kernel_width)) {
    throw std::invalid_argument("kernel width must be positive");
  }
  ManifoldSpec s;
  s.family = family;
  s.kernel_width = kernel_width;
  s.rotation_seed = rotation_seed;
  // g_s embeds the parameter square isometrically.
  s.m_source = 1.0;
  switch (family) {
    case ManifoldFamily::Identity:
      s.scale = 1.0;
      break;
    case ManifoldFamily::Rotation:
      s.scale = 1.0;
      s.rotation = random_rotation(rotation_seed);
      break;
    case ManifoldFamily::Scale:
      if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be positive");
      s.scale = scale;
      break;
  }
  s.m_target = s.scale;
  s.a_lower = s.scale;
  s.a_upper = s.scale;
  return s;
}

ObservedConstants scan_constants(const PairedSample& sample) {
  ObservedConstants c;
  c.a_lower = std::numeric_limits<double>::infinity();
  const Index n = sample.gamma.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double dg = (sample.gamma.row(i) - sample.gamma.row(j)).norm();
      const double ds = (sample.source.row(i) - sample.source.row(j)).norm();
      const double dt = (sample.target.row(i) - sample.target.row(j)).norm();
      if (dg == 0.0 || ds == 0.0) continue;
      c.m_source = std::max(c.m_source, ds / dg);
      c.m_target = std::max(c.m_target, dt / dg);
      c.a_lower = std::min(c.a_lower, dt / ds);
      c.a_upper = std::max(c.a_upper, dt / ds);
    }
  }
  if (!std::isfinite(c.a_lower)) c.a_lower = c.a_upper;
  return c;
}

PairedSample generate_paired_manifolds(const ManifoldSpec& spec, Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  auto rng = SplitMix64::stream(seed, kGammaStream);
  PairedSample s;
  s.gamma.resize(n, 2);
  s.source.resize(n, 3);
  s.target.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double g0 = rng.uniform();
    const double g1 = rng.uniform();
    const Eigen::Vector2d g(g0, g1);
    s.gamma.row(i) = g.transpose();
    s.source.row(i) = spec.source_map(g).transpose();
    s.target.row(i) = spec.target_map(g).transpose();
  }
  const ObservedConstants seen = scan_constants(s);
  const double tol = kScanTolerance * std::max(1.0, spec.scale);
  if (seen.m_source > spec.m_source + tol || seen.m_target > spec.m_target + tol ||
      seen.a_lower < spec.a_lower - tol || seen.a_upper > spec.a_upper + tol) {
    throw Error("paired manifold sample violates its analytic constants");
  }
  return s;
}

}  // namespace graphda
