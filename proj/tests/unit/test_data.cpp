#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "graphda/data.hpp"
#include "graphda/rng.hpp"

using namespace graphda;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("graphda_data_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name), std::ios::binary) << text;
    return file(name);
  }
};

template <class F>
void expect_parse_error(F&& f, const std::string& file, std::size_t line) {
  try {
    f();
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.file() == file);
    CHECK(e.line() == line);
  }
}

std::vector<int> class_vector(const std::vector<int>& sizes) {
  std::vector<int> out;
  for (std::size_t c = 0; c < sizes.size(); ++c) out.insert(out.end(), static_cast<std::size_t>(sizes[c]), static_cast<int>(c));
  return out;
}

Eigen::RowVectorXd class_mean(const Domain& d, int c) {
  Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(d.points.cols());
  Index count = 0;
  for (Index i = 0; i < d.size(); ++i) {
    if (d.labels[static_cast<std::size_t>(i)] == c) {
      m += d.points.row(i);
      ++count;
    }
  }
  return m / static_cast<double>(count);
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("CSV round trip is exact") {
  TempDir tmp;
  Domain d;
  d.points.resize(4, 3);
  d.points << 1.0 / 3.0, -2.5e-300, 7.0, 1e300, 0.1, -0.0, 123456789.123456789, -1.0 / 7.0, 2.0,
      std::nextafter(1.0, 2.0), 5e-324, -3.0;
  d.labels = {1, -1, 0, 2};
  save_csv_dataset(d, tmp.file("f.csv"), tmp.file("l.csv"));
  const auto back = load_csv_dataset(tmp.file("f.csv"), tmp.file("l.csv"));
  CHECK(back == d);
  CHECK(fingerprint(back) == fingerprint(d));

  auto rng = SplitMix64::stream(1, 700);
  Domain r;
  r.points.resize(50, 4);
  for (Index i = 0; i < r.points.size(); ++i) r.points.data()[i] = rng.normal() * std::exp(rng.uniform(-30.0, 30.0));
  r.labels.assign(50, 0);
  save_csv_dataset(r, tmp.file("f2.csv"), tmp.file("l2.csv"));
  CHECK(load_csv_dataset(tmp.file("f2.csv"), tmp.file("l2.csv")) == r);
}

TEST_CASE("missing label rows mean unlabeled and headers can be skipped") {
  TempDir tmp;
  const auto f = tmp.write("f.csv", "x,y\n1,2\n3, 4\n5,6\n\n");
  const auto l = tmp.write("l.csv", "2,1\n0,0\n");
  const auto d = load_csv_dataset(f, l, true);
  CHECK(d.size() == 3);
  CHECK(d.points(1, 1) == 4.0);
  CHECK(d.labels == std::vector<int>{0, -1, 1});
}

TEST_CASE("parse errors carry the line number") {
  TempDir tmp;
  const auto ok_labels = tmp.write("ok.csv", "0,0\n");
  const auto bad_num = tmp.write("a.csv", "1,2\n3,4\n5,x\n");
  expect_parse_error([&] { load_csv_dataset(bad_num, ok_labels); }, bad_num, 3);
  const auto ragged = tmp.write("b.csv", "1,2\n3\n");
  expect_parse_error([&] { load_csv_dataset(ragged, ok_labels); }, ragged, 2);
  const auto nan = tmp.write("c.csv", "1,nan\n");
  expect_parse_error([&] { load_csv_dataset(nan, ok_labels); }, nan, 1);

  const auto feats = tmp.write("f.csv", "1\n2\n3\n");
  const auto l1 = tmp.write("l1.csv", "0,1\n1\n");
  expect_parse_error([&] { load_csv_dataset(feats, l1); }, l1, 2);
  const auto l2 = tmp.write("l2.csv", "0,1\n1,0\n0,1\n");
  expect_parse_error([&] { load_csv_dataset(feats, l2); }, l2, 3);
  const auto l3 = tmp.write("l3.csv", "1,-2\n");
  expect_parse_error([&] { load_csv_dataset(feats, l3); }, l3, 1);

  const auto l4 = tmp.write("l4.csv", "3,0\n");
  try {
    load_csv_dataset(feats, l4);
    FAIL("expected IndexOutOfRange");
  } catch (const IndexOutOfRange& e) {
    CHECK(e.index() == 3);
  }
  CHECK_THROWS_AS(load_csv_dataset(tmp.file("none.csv"), l4), IoError);
}

TEST_CASE("keeping everything is the identity mask") {
  const auto labels = class_vector({7, 5, 9});
  const auto m = mask_labels_ratio(labels, 1.0, 3);
  CHECK(m.kept.size() == labels.size());
  CHECK(m.held_out.empty());
  const auto none = mask_labels_ratio(labels, 0.0, 3);
  CHECK(none.kept.empty());
  CHECK(none.held_out.size() == labels.size());
  CHECK_THROWS_AS(mask_labels(labels, 22, 1), std::invalid_argument);
  CHECK_THROWS_AS(mask_labels_ratio(labels, 1.5, 1), std::invalid_argument);
}

TEST_CASE("one label per class when the budget equals the class count") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto labels = class_vector({20, 3, 11, 1});
    labels.insert(labels.begin() + 5, -1);
    const auto m = mask_labels(labels, 4, seed);
    std::map<int, int> count;
    for (Index i : m.kept) ++count[labels[static_cast<std::size_t>(i)]];
    CHECK(count == std::map<int, int>{{0, 1}, {1, 1}, {2, 1}, {3, 1}});
    CHECK(m.kept.size() + m.held_out.size() == labels.size() - 1);
  }
}

TEST_CASE("masks are deterministic, sorted, disjoint and stratified") {
  const auto labels = class_vector({60, 30, 10});
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto a = mask_labels(labels, 23, seed);
    const auto b = mask_labels(labels, 23, seed);
    CHECK(a.kept == b.kept);
    CHECK(a.held_out == b.held_out);
    CHECK(std::is_sorted(a.kept.begin(), a.kept.end()));
    CHECK(std::is_sorted(a.held_out.begin(), a.held_out.end()));
    std::vector<Index> both;
    std::set_intersection(a.kept.begin(), a.kept.end(), a.held_out.begin(), a.held_out.end(),
                          std::back_inserter(both));
    CHECK(both.empty());
    // One each, then 20 over 59:29:9 gives 12.16, 5.98, 1.86; largest remainder rounds to 12, 6, 2.
    std::map<int, int> count;
    for (Index i : a.kept) ++count[labels[static_cast<std::size_t>(i)]];
    CHECK(count == std::map<int, int>{{0, 13}, {1, 7}, {2, 3}});
  }
  CHECK(mask_labels(labels, 23, 1).kept != mask_labels(labels, 23, 2).kept);
}

TEST_CASE("random subsets") {
  const auto s = random_subset(100, 30, 4);
  CHECK(s.size() == 30);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  CHECK(s == random_subset(100, 30, 4));
  CHECK(random_subset(5, 5, 1) == std::vector<Index>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(random_subset(5, 6, 1), std::invalid_argument);

  Domain d;
  d.points = Eigen::MatrixXd::Identity(3, 3);
  d.labels = {0, 1, 0};
  const std::vector<Index> pick{2, 0};
  const auto sub = subset_domain(d, pick);
  CHECK(sub.points.row(0) == d.points.row(2));
  CHECK(sub.labels == std::vector<int>{0, 0});
  const std::vector<Index> bad{3};
  CHECK_THROWS_AS(subset_domain(d, bad), IndexOutOfRange);
}

TEST_CASE("misclassification examples") {
  const std::vector<int> truth{0, 1, 1, 0};
  const std::vector<Index> all{0, 1, 2, 3};
  const auto right = misclassification_rate(truth, truth, all, 2);
  CHECK(right.rate == 0.0);
  CHECK(right.total == 4);
  const std::vector<int> flipped{1, 0, 0, 1};
  CHECK(misclassification_rate(flipped, truth, all, 2).rate == 1.0);
  const std::vector<int> half{0, 0, 1, 1};
  const auto h = misclassification_rate(half, truth, all, 2);
  CHECK(h.rate == 0.5);
  CHECK(h.wrong == 2);
  CHECK(h.confusion == std::vector<std::vector<Index>>{{1, 1}, {1, 1}});
  const std::vector<Index> some{1, 2};
  CHECK(misclassification_rate(half, truth, some, 2).rate == 0.5);
  CHECK_THROWS_AS(misclassification_rate(half, truth, std::vector<Index>{}, 2), std::invalid_argument);
  CHECK_THROWS_AS(misclassification_rate(half, std::vector<int>{0}, all, 2), std::invalid_argument);
}

TEST_CASE("synthetic class means") {
  SyntheticConfig c;
  c.n_per_domain = 4000;
  c.seed = 11;
  const auto d = generate_synthetic(c);
  REQUIRE(d.source.size() == 4000);
  REQUIRE(d.target.size() == 4000);
  CHECK(d.class_count == 2);
  const double tol = 4.0 * c.stddev / std::sqrt(2000.0);
  const double angle = c.rotation_degrees * M_PI / 180.0;
  Eigen::Matrix3d rot;
  rot << std::cos(angle), -std::sin(angle), 0.0, std::sin(angle), std::cos(angle), 0.0, 0.0, 0.0, 1.0;
  for (int cls : {0, 1}) {
    const Eigen::RowVector3d want = (cls == 0 ? -1.0 : 1.0) * c.offset.transpose();
    CHECK((class_mean(d.source, cls) - want).cwiseAbs().maxCoeff() <= tol);
    CHECK((class_mean(d.target, cls) - want * rot.transpose()).cwiseAbs().maxCoeff() <= tol);
  }
  CHECK(d.source.labels[1999] == 0);
  CHECK(d.source.labels[2000] == 1);
}

TEST_CASE("tiny spread collapses onto the class centers") {
  SyntheticConfig c;
  c.n_per_domain = 20;
  c.stddev = 1e-6;
  c.rotation_degrees = 0.0;
  const auto d = generate_synthetic(c);
  for (Index i = 0; i < 20; ++i) {
    const Eigen::RowVector3d want = (i < 10 ? -1.0 : 1.0) * c.offset.transpose();
    CHECK((d.source.points.row(i) - want).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK((d.target.points.row(i) - want).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("zero rotation gives matching domain statistics") {
  SyntheticConfig c;
  c.n_per_domain = 4000;
  c.rotation_degrees = 0.0;
  const auto d = generate_synthetic(c);
  const double tol = 2.0 * 4.0 / std::sqrt(2000.0);
  for (int cls : {0, 1}) {
    CHECK((class_mean(d.source, cls) - class_mean(d.target, cls)).cwiseAbs().maxCoeff() <= tol);
  }
  CHECK_FALSE(d.source.points == d.target.points);
}

TEST_CASE("synthetic config validation") {
  SyntheticConfig c;
  c.n_per_domain = 1;
  CHECK_THROWS_AS(generate_synthetic(c), std::invalid_argument);
  c = SyntheticConfig{};
  c.stddev = 0.0;
  CHECK_THROWS_AS(generate_synthetic(c), std::invalid_argument);
}

TEST_CASE("fingerprints are deterministic and sensitive") {
  SyntheticConfig c;
  c.n_per_domain = 50;
  const auto a = generate_synthetic(c);
  const auto b = generate_synthetic(c);
  CHECK(fingerprint(a.source) == fingerprint(b.source));
  CHECK(fingerprint(a.target) == fingerprint(b.target));
  auto changed = a.source;
  changed.points(3, 1) = std::nextafter(changed.points(3, 1), 10.0);
  CHECK(fingerprint(changed) != fingerprint(a.source));
  changed = a.source;
  changed.labels[0] = -1;
  CHECK(fingerprint(changed) != fingerprint(a.source));
  c.seed = 2;
  CHECK(fingerprint(generate_synthetic(c).source) != fingerprint(a.source));
}

TEST_CASE("experiment assembly") {
  SyntheticConfig c;
  c.n_per_domain = 80;
  const auto d = generate_synthetic(c);
  const auto e = make_experiment(d, 10, Index{40}, 5);
  CHECK(e.problem.source_labeled.size() == 80);
  CHECK(e.problem.target_points.rows() == 40);
  CHECK(e.problem.target_labeled.size() == 10);
  CHECK(e.evaluation.size() == 30);
  CHECK(e.target_truth.size() == 40);
  for (std::size_t k = 0; k < e.problem.target_labeled.size(); ++k) {
    CHECK(e.problem.target_labels[k] == e.target_truth[static_cast<std::size_t>(e.problem.target_labeled[k])]);
  }
  const auto again = make_experiment(d, 10, Index{40}, 5);
  CHECK(again.problem.target_points == e.problem.target_points);
  CHECK(again.evaluation == e.evaluation);
}

}  // TEST_SUITE
