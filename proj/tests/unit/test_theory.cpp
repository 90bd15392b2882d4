#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "graphda/theory.hpp"
#include "oracles.hpp"

using namespace graphda;

namespace {

WeightMatrix path(Index n, const std::vector<double>& weights) {
  std::vector<Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, weights[static_cast<std::size_t>(i)]});
  return WeightMatrix::from_edges(n, e);
}

WeightMatrix unit_path(Index n) { return path(n, std::vector<double>(static_cast<std::size_t>(n), 1.0)); }

std::vector<Index> layer_sizes(const LayerDecomposition& d) {
  std::vector<Index> s;
  for (const auto& l : d.layers) s.push_back(static_cast<Index>(l.size()));
  return s;
}

std::vector<Index> sample_labels(SplitMix64& rng, Index n, Index count) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> out(all.begin(), all.begin() + count);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("layers of a path and of a labeled graph") {
  const auto d = layer_decomposition(unit_path(3), std::vector<Index>{0});
  CHECK(d.depth() == 2);
  CHECK(d.layers == std::vector<std::vector<Index>>{{0}, {1}, {2}});
  const auto full = layer_decomposition(unit_path(4), std::vector<Index>{0, 1, 2, 3});
  CHECK(full.depth() == 0);
  CHECK(compute_kappa(layer_stats(full, unit_path(4)), full) == 0.0);
}

TEST_CASE("unreachable nodes are reported") {
  const auto w = WeightMatrix::from_edges(5, {{0, 1, 1.0}, {2, 3, 1.0}});
  try {
    layer_decomposition(w, std::vector<Index>{1});
    FAIL("expected UnreachableNodes");
  } catch (const UnreachableNodes& e) {
    CHECK(e.nodes() == std::vector<Index>{2, 3, 4});
  }
}

TEST_CASE("layers match all-pairs hop distances") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto rng = SplitMix64::stream(seed, 600);
    const Index n = 50;
    const auto w = oracle::random_connected_graph(rng, n, 0.03);
    const auto labeled = sample_labels(rng, n, 5);
    const auto d = layer_decomposition(w, labeled);
    const auto hops = oracle::hop_distances(w, labeled);
    Index covered = 0;
    for (Index q = 0; q <= d.depth(); ++q) {
      for (Index i : d.layers[static_cast<std::size_t>(q)]) {
        CHECK(hops[static_cast<std::size_t>(i)] == q);
        CHECK(d.hop[static_cast<std::size_t>(i)] == q);
        ++covered;
      }
    }
    CHECK(covered == n);
  }
}

TEST_CASE("path and star statistics") {
  const std::vector<double> pw{0.9, 0.4, 0.7, 0.2};
  const auto p = path(5, pw);
  const auto d = layer_decomposition(p, std::vector<Index>{0});
  const auto s = layer_stats(d, p);
  for (Index q = 1; q <= 4; ++q) {
    CHECK(s.k_min[static_cast<std::size_t>(q)] == 1);
    CHECK(s.w_min_layer[static_cast<std::size_t>(q)] == pw[static_cast<std::size_t>(q - 1)]);
  }
  for (Index q = 0; q < 4; ++q) CHECK(s.k_max[static_cast<std::size_t>(q)] == 1);
  CHECK(s.w_min == 0.2);

  const auto star = WeightMatrix::from_edges(5, {{0, 1, 0.5}, {0, 2, 0.3}, {0, 3, 0.8}, {0, 4, 0.6}});
  const auto ds = layer_decomposition(star, std::vector<Index>{0});
  const auto ss = layer_stats(ds, star);
  CHECK(ds.depth() == 1);
  CHECK(ss.k_min[1] == 1);
  CHECK(ss.k_max[0] == 4);
  CHECK(ss.w_min == 0.3);
  CHECK(compute_kappa(ss, ds) == 4.0);
}

TEST_CASE("statistics match a per-node recount") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto rng = SplitMix64::stream(seed, 601);
    const Index n = 40;
    const auto w = oracle::random_connected_graph(rng, n, 0.05);
    const auto labeled = sample_labels(rng, n, 3);
    const auto d = layer_decomposition(w, labeled);
    const auto s = layer_stats(d, w);
    const auto hops = oracle::hop_distances(w, labeled);
    const Eigen::MatrixXd dense = w.dense();
    const Index depth = d.depth();
    for (Index q = 0; q <= depth; ++q) {
      Index kmin = n + 1, kmax = 0;
      double wmin = INFINITY;
      for (Index i = 0; i < n; ++i) {
        if (hops[static_cast<std::size_t>(i)] != q) continue;
        Index down = 0, up = 0;
        for (Index j = 0; j < n; ++j) {
          if (dense(i, j) <= 0.0) continue;
          if (hops[static_cast<std::size_t>(j)] == q - 1) {
            ++down;
            wmin = std::min(wmin, dense(i, j));
          }
          if (hops[static_cast<std::size_t>(j)] == q + 1) ++up;
        }
        kmin = std::min(kmin, down);
        kmax = std::max(kmax, up);
      }
      if (q >= 1) {
        CHECK(s.k_min[static_cast<std::size_t>(q)] == kmin);
        CHECK(s.w_min_layer[static_cast<std::size_t>(q)] == wmin);
      }
      if (q < depth) CHECK(s.k_max[static_cast<std::size_t>(q)] == kmax);
    }
    CHECK(compute_kappa(s, d) == oracle::kappa_nested(layer_sizes(d), s.k_min, s.k_max));
  }
}

TEST_CASE("path kappa is a triangular number") {
  for (Index q = 1; q <= 20; ++q) {
    const auto p = unit_path(q + 1);
    const auto d = layer_decomposition(p, std::vector<Index>{0});
    REQUIRE(d.depth() == q);
    CHECK(compute_kappa(layer_stats(d, p), d) == static_cast<double>(q * (q + 1) / 2));
  }
}

TEST_CASE("single-layer kappa") {
  // Two labeled nodes, four unlabeled each seeing both labels.
  std::vector<Edge> e;
  for (Index u = 2; u < 6; ++u) {
    e.push_back({0, u, 1.0});
    e.push_back({1, u, 1.0});
  }
  const auto w = WeightMatrix::from_edges(6, e);
  const auto d = layer_decomposition(w, std::vector<Index>{0, 1});
  REQUIRE(d.depth() == 1);
  CHECK(compute_kappa(layer_stats(d, w), d) == 2.0);
}

TEST_CASE("lemma 1 cases") {
  Eigen::VectorXd a(3), l(3);
  a << 1.0, -2.0, 0.5;
  l << 0.0, 0.3, 0.9;
  const auto same = check_lemma1(a, a, l, l);
  CHECK(same.check.lhs == 0.0);
  CHECK(same.check.rhs == 0.0);
  CHECK(same.check.pass);

  Eigen::VectorXd lt(3);
  lt << 0.0, 0.5, 1.2;
  const auto zero = check_lemma1(a, Eigen::VectorXd::Zero(3), l, lt);
  const double energy = 0.3 * 4.0 + 0.9 * 0.25;
  CHECK(zero.check.lhs == doctest::Approx(energy).epsilon(1e-14));
  CHECK(zero.c == doctest::Approx(a.norm()).epsilon(1e-14));
  CHECK(zero.delta == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(zero.lambda_r == 1.2);
  CHECK(zero.check.rhs >= zero.c * zero.c * zero.delta + 2.0 * zero.c * 1.2 * zero.c - 1e-12);
  CHECK(zero.check.pass);

  CHECK_THROWS_AS(check_lemma1(a, Eigen::VectorXd::Zero(2), l, l), std::invalid_argument);
}

TEST_CASE("lemma 1 on random inputs") {
  auto rng = SplitMix64::stream(1, 602);
  for (int t = 0; t < 500; ++t) {
    const Index r = 1 + static_cast<Index>(rng.below(20));
    Eigen::VectorXd as(r), at(r), ls(r), lt(r);
    for (Index k = 0; k < r; ++k) {
      as(k) = rng.normal() * 3.0;
      at(k) = t % 3 == 0 ? as(k) + 0.01 * rng.normal() : rng.normal();
      ls(k) = rng.uniform(0.0, 2.0);
      lt(k) = t % 2 == 0 ? ls(k) : rng.uniform(0.0, 2.0);
    }
    std::sort(ls.data(), ls.data() + r);
    std::sort(lt.data(), lt.data() + r);
    const auto res = check_lemma1(as, at, ls, lt);
    CHECK(res.check.pass);
    const double direct = std::abs((ls.array() * as.array().square()).sum() -
                                   (lt.array() * at.array().square()).sum());
    CHECK(res.check.lhs == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("lemma 3 on a hand-checked path") {
  const auto p = path(4, {1.0, 0.5, 2.0});
  Eigen::VectorXd f(4), g(4);
  f << 1.0, 1.0, -1.0, -1.0;
  g << 0.3, 0.8, -0.2, -1.5;  // entry 0 gets clamped
  const auto d = layer_decomposition(p, std::vector<Index>{0});
  const auto layers = check_lemma3(p, f, g, d, layer_stats(d, p));
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].b == 0.0);
  CHECK(layers[0].b_hat == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(layers[0].check.lhs == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(layers[0].check.rhs == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(layers[1].b == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(layers[1].b_hat == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(layers[1].check.lhs == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(layers[1].check.rhs == doctest::Approx(10.24).epsilon(1e-12));
  CHECK(layers[2].b_hat == doctest::Approx(3.38).epsilon(1e-12));
  CHECK(layers[2].check.lhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(layers[2].check.rhs == doctest::Approx(4.41).epsilon(1e-12));
  for (const auto& l : layers) CHECK(l.check.pass);

  const auto exact = check_lemma3(p, f, f, d, layer_stats(d, p));
  for (const auto& l : exact) CHECK(l.check.lhs == 0.0);
}

TEST_CASE("lemma 3 on random instances") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto rng = SplitMix64::stream(seed, 603);
    const Index n = 10 + static_cast<Index>(rng.below(50));
    const auto w = oracle::random_connected_graph(rng, n, rng.uniform(0.0, 0.1));
    const auto labeled = sample_labels(rng, n, 1 + static_cast<Index>(rng.below(5)));
    Eigen::VectorXd f(n), g(n);
    for (Index i = 0; i < n; ++i) {
      f(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      g(i) = f(i) + rng.normal() * (seed % 4 == 0 ? 0.1 : 1.5);
    }
    const auto d = layer_decomposition(w, labeled);
    const auto s = layer_stats(d, w);
    const auto layers = check_lemma3(w, f, g, d, s);
    CHECK(static_cast<Index>(layers.size()) == d.depth());
    double between = 0.0;
    for (const auto& l : layers) {
      CHECK(l.check.pass);
      between += l.b;
    }
    // Between-layer edges are a subset of all edges.
    CHECK(between <= dirichlet_energy(laplacian(w), f) + 1e-10);
  }
}

TEST_CASE("clamping replaces labeled entries only") {
  Eigen::VectorXd f(3), g(3);
  f << 1.0, 2.0, 3.0;
  g << 9.0, 8.0, 7.0;
  const auto c = clamp_to_labels(g, f, std::vector<Index>{1});
  CHECK(c == Eigen::Vector3d(9.0, 2.0, 7.0));
}

TEST_CASE("lemma 2 on paired manifolds") {
  for (ManifoldFamily family : {ManifoldFamily::Identity, ManifoldFamily::Rotation, ManifoldFamily::Scale}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto spec = make_manifold_spec(family, 1.5, 0.3, seed);
      const auto sample = generate_paired_manifolds(spec, 40, seed);
      const auto ws = build_knn_graph(sample.source, 6, spec.kernel_width);
      const auto wt = build_knn_graph(sample.target, 6, spec.kernel_width);
      const auto r = check_lemma2(spec, sample, ws, wt);
      CHECK(r.check.pass);
      CHECK(r.check.lhs == r.delta_observed);
      CHECK(r.check.rhs == r.rho_max);
      if (family == ManifoldFamily::Identity) CHECK(r.delta_observed == 0.0);
      if (family == ManifoldFamily::Rotation) CHECK(r.delta_observed <= 1e-10);
      if (family == ManifoldFamily::Scale) {
        CHECK(spec.a_lower == 1.5);
        CHECK(spec.a_upper == 1.5);
        CHECK(spec.a() == 0.5);
      } else {
        CHECK(spec.a() == 0.0);
      }
    }
  }
}

TEST_CASE("bound on exact estimates is trivially met") {
  InstanceOptions o;
  o.nodes = 60;
  auto in = make_theorem_instance(o);
  in.target_estimate = in.target_truth;
  const auto r = theorem1_bound(in);
  CHECK(r.error == 0.0);
  CHECK(r.all_pass);
}

TEST_CASE("full bound holds on paired instances") {
  for (ManifoldFamily family : {ManifoldFamily::Identity, ManifoldFamily::Rotation, ManifoldFamily::Scale}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      InstanceOptions o;
      o.family = family;
      o.nodes = 80;
      o.seed = seed;
      const auto r = theorem1_bound(make_theorem_instance(o));
      for (const auto& c : r.checks) {
        INFO(c.name << " lhs=" << c.lhs << " rhs=" << c.rhs);
        CHECK(c.pass);
      }
      CHECK(r.all_pass);
      CHECK(r.error <= r.bound + 1e-8);
      CHECK(r.b_hat_observed <= r.b_hat + 1e-8);
      CHECK(r.effective_basis_size >= r.basis_size);
      CHECK(r.kappa == oracle::kappa_nested(r.layer_sizes, r.k_min, r.k_max));
    }
  }
}

TEST_CASE("fully labeled target reports a zero bound") {
  InstanceOptions o;
  o.nodes = 30;
  o.target_labels = 30;
  const auto r = theorem1_bound(make_theorem_instance(o));
  CHECK(r.fully_labeled);
  CHECK(r.depth == 0);
  CHECK(r.kappa == 0.0);
  CHECK(r.bound == 0.0);
  CHECK(r.error == 0.0);
  CHECK(r.all_pass);
}

}  // TEST_SUITE
