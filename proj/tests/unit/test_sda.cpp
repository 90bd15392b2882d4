#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "graphda/sda.hpp"
#include "oracles.hpp"

using namespace graphda;

namespace {

struct Instance {
  SpectralBasis bs;
  SpectralBasis bt;
  std::vector<Index> ls;
  std::vector<Index> lt;
  Eigen::MatrixXd ys;
  Eigen::MatrixXd yt;
};

std::vector<Index> random_subset(SplitMix64& rng, Index n, Index m) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < m; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> out(all.begin(), all.begin() + m);
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd random_one_hot(SplitMix64& rng, Index rows, int classes) {
  std::vector<int> c(static_cast<std::size_t>(rows));
  for (auto& v : c) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
  return one_hot(c, classes);
}

Instance random_instance(std::uint64_t seed, Index n, Index r, Index labels, int classes) {
  auto rng = SplitMix64::stream(seed, 300);
  Instance in;
  in.bs = smallest_eigenpairs(normalized_laplacian(oracle::random_connected_graph(rng, n, 0.25)), r);
  in.bt = smallest_eigenpairs(normalized_laplacian(oracle::random_connected_graph(rng, n, 0.25)), r);
  in.ls = random_subset(rng, n, labels);
  in.lt = random_subset(rng, n, labels);
  in.ys = random_one_hot(rng, labels, classes);
  in.yt = random_one_hot(rng, labels, classes);
  return in;
}

CoefficientPair solve(const Instance& in, double mu) {
  return solve_coefficients(in.bs, in.bt, in.ls, in.lt, in.ys, in.yt, mu);
}

double objective(const Instance& in, double mu, const CoefficientPair& c) {
  return sda_objective(in.bs, in.bt, in.ls, in.lt, in.ys, in.yt, mu, c);
}

}  // namespace

TEST_SUITE("sda") {

TEST_CASE("identical domains give identical coefficients") {
  for (double mu : {0.01, 1.0, 50.0}) {
    Instance in = random_instance(1, 20, 5, 8, 2);
    in.bt = in.bs;
    in.lt = in.ls;
    in.yt = in.ys;
    const auto c = solve(in, mu);
    CHECK((c.source - c.target).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("matches the assembled normal equations") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto pick = SplitMix64::stream(seed, 301);
    const Index n = 10 + static_cast<Index>(pick.below(31));
    const Index r = 1 + static_cast<Index>(pick.below(10));
    const Index labels = std::min<Index>(n, r + 3 + static_cast<Index>(pick.below(6)));
    const double mu = std::exp(pick.uniform(-3.0, 3.0));
    const int classes = 2 + static_cast<int>(pick.below(3));
    const Instance in = random_instance(seed, n, r, labels, classes);
    const auto c = solve(in, mu);
    const auto [os, ot] = oracle::sda_normal_equations(in.bs.eigenvectors, in.bt.eigenvectors,
                                                       in.ls, in.lt, in.ys, in.yt, mu);
    CHECK((c.source - os).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((c.target - ot).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(oracle::sda_gradient_norm(in.bs.eigenvectors, in.bt.eigenvectors, in.ls, in.lt, in.ys,
                                    in.yt, mu, c.source, c.target) <= 1e-8);
  }
}

TEST_CASE("large coupling forces equal coefficients") {
  const Instance in = random_instance(4, 20, 5, 8, 2);
  const auto c = solve(in, 1e6);
  CHECK((c.source - c.target).norm() <= 1e-3 * c.source.norm());
}

TEST_CASE("objective is a local minimum") {
  const Instance in = random_instance(5, 25, 6, 10, 3);
  const double mu = 0.7;
  const auto c = solve(in, mu);
  const double best = objective(in, mu, c);
  auto rng = SplitMix64::stream(5, 302);
  for (int k = 0; k < 100; ++k) {
    CoefficientPair p = c;
    for (Index i = 0; i < p.source.size(); ++i) p.source.data()[i] += 1e-3 * rng.normal();
    for (Index i = 0; i < p.target.size(); ++i) p.target.data()[i] += 1e-3 * rng.normal();
    CHECK(objective(in, mu, p) >= best);
  }
}

TEST_CASE("larger coupling never increases the coefficient gap") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance in = random_instance(seed + 100, 20, 5, 9, 2);
    double previous = INFINITY;
    for (double mu = 0.01; mu <= 100.0; mu *= 2.0) {
      const auto c = solve(in, mu);
      const double gap = (c.source - c.target).norm();
      CHECK(gap <= previous * (1.0 + 1e-9) + 1e-12);
      previous = gap;
    }
  }
}

TEST_CASE("singular system is reported") {
  // One label per side and R = 4: the coupled system has rank deficiency.
  Instance in = random_instance(6, 12, 4, 1, 2);
  CHECK_THROWS_AS(solve(in, 1.0), SingularSystem);
}

TEST_CASE("argument checks") {
  Instance in = random_instance(7, 15, 4, 6, 2);
  CHECK_THROWS_AS(solve(in, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve(in, -1.0), std::invalid_argument);
  Instance bad = in;
  auto rng = SplitMix64::stream(7, 304);
  bad.bt = smallest_eigenpairs(normalized_laplacian(oracle::random_connected_graph(rng, 15, 0.3)), 3);
  CHECK_THROWS_AS(solve(bad, 1.0), std::invalid_argument);
  bad = in;
  std::swap(bad.ls[0], bad.ls[1]);
  CHECK_THROWS_AS(solve(bad, 1.0), std::invalid_argument);
  bad = in;
  bad.lt.back() = 99;
  CHECK_THROWS_AS(solve(bad, 1.0), IndexOutOfRange);
  bad = in;
  bad.ys.conservativeResize(bad.ys.rows() - 1, Eigen::NoChange);
  CHECK_THROWS_AS(solve(bad, 1.0), std::invalid_argument);
}

TEST_CASE("label decoding") {
  const auto b = smallest_eigenpairs(
      laplacian(WeightMatrix::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}})), 4);
  // Alpha that reproduces exact one-hot rows.
  const std::vector<int> classes{2, 0, 1, 2};
  const Eigen::MatrixXd f = one_hot(classes, 3);
  const Eigen::MatrixXd alpha = gft(b, f);
  CHECK(predict_labels(b, alpha) == classes);

  auto rng = SplitMix64::stream(8, 303);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd est(6, 4);
    for (Index i = 0; i < est.size(); ++i) est.data()[i] = std::round(4.0 * rng.normal()) / 4.0;
    const auto got = argmax_rows(est);
    for (Index i = 0; i < 6; ++i) {
      int best = 0;
      for (int c = 1; c < 4; ++c) {
        if (est(i, c) > est(i, best)) best = c;
      }
      CHECK(got[static_cast<std::size_t>(i)] == best);
    }
  }
  Eigen::MatrixXd tie(1, 3);
  tie << 0.5, 0.5, 0.1;
  CHECK(argmax_rows(tie) == std::vector<int>{0});
}

TEST_CASE("one-hot encoding") {
  const std::vector<int> c{1, 0, 2};
  const auto y = one_hot(c, 3);
  CHECK(y.rows() == 3);
  CHECK(y(0, 1) == 1.0);
  CHECK(y.sum() == 3.0);
  const std::vector<int> bad{3};
  CHECK_THROWS_AS(one_hot(bad, 3), std::invalid_argument);
}

}  // TEST_SUITE
