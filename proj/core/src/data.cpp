#include "graphda/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "graphda/rng.hpp"

namespace graphda {

namespace {

// Stream ids keep the purposes of one seed apart.
constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr std::uint64_t kMaskStream = 3;
constexpr std::uint64_t kSubsetStream = 4;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc() && ptr == end && !field.empty();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (in.bad()) throw IoError("read failed: " + path);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

void fill_gaussian_domain(Domain& d, Index n, const Eigen::Vector3d& offset, double stddev,
                          SplitMix64& rng) {
  d.points.resize(n, 3);
  d.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int cls = i < n / 2 ? 0 : 1;
    const Eigen::Vector3d center = cls == 0 ? Eigen::Vector3d(-offset) : offset;
    for (Index k = 0; k < 3; ++k) d.points(i, k) = center(k) + stddev * rng.normal();
    d.labels[static_cast<std::size_t>(i)] = cls;
  }
}

// First `count` entries of a Fisher-Yates shuffle of `pool`.
std::vector<Index> draw(std::vector<Index> pool, Index count, SplitMix64& rng) {
  const auto n = pool.size();
  for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(pool[k], pool[pick]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_per_domain < 2 || n_per_domain % 2 != 0) {
    throw std::invalid_argument("synthetic: n_per_domain must be even and >= 2");
  }
  if (!(stddev > 0.0) || !std::isfinite(stddev)) throw std::invalid_argument("synthetic: stddev must be > 0");
  if (!offset.allFinite() || !std::isfinite(rotation_degrees)) {
    throw std::invalid_argument("synthetic: non-finite offset or rotation");
  }
}

DomainPair generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  DomainPair out;
  out.class_count = 2;
  auto source_rng = SplitMix64::stream(config.seed, kSourceStream);
  auto target_rng = SplitMix64::stream(config.seed, kTargetStream);
  fill_gaussian_domain(out.source, config.n_per_domain, config.offset, config.stddev, source_rng);
  fill_gaussian_domain(out.target, config.n_per_domain, config.offset, config.stddev, target_rng);
  const double a = config.rotation_degrees * std::numbers::pi / 180.0;
  Eigen::Matrix3d rot;
  rot << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  out.target.points = out.target.points * rot.transpose();
  return out;
}

std::string format_features_csv(const Eigen::MatrixXd& points) {
  std::string s;
  char buf[32];
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index k = 0; k < points.cols(); ++k) {
      if (k > 0) s += ',';
      std::snprintf(buf, sizeof buf, "%.17g", points(i, k));
      s += buf;
    }
    s += '\n';
  }
  return s;
}

std::string format_labels_csv(std::span<const int> labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += std::to_string(i) + ',' + std::to_string(labels[i]) + '\n';
  }
  return s;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot replace " + path);
  }
}

Domain load_csv_dataset(const std::string& features_path, const std::string& labels_path,
                        bool skip_header) {
  const auto feature_lines = read_lines(features_path);
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t ln = skip_header ? 1 : 0; ln < feature_lines.size(); ++ln) {
    const auto fields = split(feature_lines[ln]);
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      double v = 0.0;
      if (!parse_number(f, v) || !std::isfinite(v)) {
        throw ParseError(features_path, ln + 1, "malformed number '" + std::string(f) + "'");
      }
      row.push_back(v);
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError(features_path, ln + 1,
                       "expected " + std::to_string(width) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(features_path, feature_lines.size(), "no samples");

  Domain d;
  const auto n = static_cast<Index>(rows.size());
  d.points.resize(n, static_cast<Index>(width));
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < static_cast<Index>(width); ++k) d.points(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  d.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  const auto label_lines = read_lines(labels_path);
  for (std::size_t ln = 0; ln < label_lines.size(); ++ln) {
    const auto fields = split(label_lines[ln]);
    long long idx = 0;
    int cls = 0;
    if (fields.size() != 2 || !parse_number(fields[0], idx) || !parse_number(fields[1], cls)) {
      throw ParseError(labels_path, ln + 1, "expected 'sample_index,class_id'");
    }
    if (idx < 0 || idx >= n) throw IndexOutOfRange(static_cast<Index>(idx), n);
    if (cls < -1) throw ParseError(labels_path, ln + 1, "class id below -1");
    if (seen[static_cast<std::size_t>(idx)]) throw ParseError(labels_path, ln + 1, "duplicate sample index");
    seen[static_cast<std::size_t>(idx)] = true;
    d.labels[static_cast<std::size_t>(idx)] = cls;
  }
  return d;
}

void save_csv_dataset(const Domain& domain, const std::string& features_path,
                      const std::string& labels_path) {
  if (static_cast<Index>(domain.labels.size()) != domain.size()) {
    throw std::invalid_argument("save_csv_dataset: label count mismatch");
  }
  write_file_atomic(features_path, format_features_csv(domain.points));
  write_file_atomic(labels_path, format_labels_csv(domain.labels));
}

LabelMask mask_labels(std::span<const int> labels, Index keep_count, std::uint64_t seed) {
  int classes = 0;
  Index labeled = 0;
  for (int c : labels) {
    if (c >= 0) {
      classes = std::max(classes, c + 1);
      ++labeled;
    }
  }
  if (keep_count < 0 || keep_count > labeled) {
    throw std::invalid_argument("mask_labels: keep_count " + std::to_string(keep_count) +
                                " exceeds the " + std::to_string(labeled) + " available labels");
  }
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
  }
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (!members[c].empty()) present.push_back(c);
  }

  auto rng = SplitMix64::stream(seed, kMaskStream);
  LabelMask mask;
  if (keep_count < static_cast<Index>(present.size())) {
    std::vector<Index> pool;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= 0) pool.push_back(static_cast<Index>(i));
    }
    mask.kept = draw(std::move(pool), keep_count, rng);
  } else {
    std::vector<Index> quota(members.size(), 0);
    Index spare_total = 0;
    for (auto c : present) {
      quota[c] = 1;
      spare_total += static_cast<Index>(members[c].size()) - 1;
    }
    const Index rest = keep_count - static_cast<Index>(present.size());
    if (rest > 0) {
      std::vector<std::pair<double, std::size_t>> remainders;
      Index assigned = 0;
      for (auto c : present) {
        const double exact = static_cast<double>(rest) *
                             static_cast<double>(members[c].size() - 1) / static_cast<double>(spare_total);
        const auto whole = static_cast<Index>(std::floor(exact));
        quota[c] += whole;
        assigned += whole;
        remainders.push_back({exact - static_cast<double>(whole), c});
      }
      std::stable_sort(remainders.begin(), remainders.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t k = 0; assigned < rest; ++k, ++assigned) ++quota[remainders[k].second];
    }
    for (auto c : present) {
      auto picked = draw(members[c], quota[c], rng);
      mask.kept.insert(mask.kept.end(), picked.begin(), picked.end());
    }
  }
  std::sort(mask.kept.begin(), mask.kept.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0 && !std::binary_search(mask.kept.begin(), mask.kept.end(), static_cast<Index>(i))) {
      mask.held_out.push_back(static_cast<Index>(i));
    }
  }
  return mask;
}

LabelMask mask_labels_ratio(std::span<const int> labels, double keep_ratio, std::uint64_t seed) {
  if (!(keep_ratio >= 0.0 && keep_ratio <= 1.0)) throw std::invalid_argument("keep_ratio must lie in [0, 1]");
  const auto labeled = std::count_if(labels.begin(), labels.end(), [](int c) { return c >= 0; });
  return mask_labels(labels, static_cast<Index>(std::llround(keep_ratio * static_cast<double>(labeled))), seed);
}

std::vector<Index> random_subset(Index n, Index count, std::uint64_t seed) {
  if (count < 0 || count > n) throw std::invalid_argument("random_subset: count outside [0, n]");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  auto rng = SplitMix64::stream(seed, kSubsetStream);
  auto out = draw(std::move(pool), count, rng);
  std::sort(out.begin(), out.end());
  return out;
}

Domain subset_domain(const Domain& domain, std::span<const Index> indices) {
  Domain out;
  out.points.resize(static_cast<Index>(indices.size()), domain.points.cols());
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index i = indices[k];
    if (i < 0 || i >= domain.size()) throw IndexOutOfRange(i, domain.size());
    out.points.row(static_cast<Index>(k)) = domain.points.row(i);
    out.labels.push_back(domain.labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

Experiment make_experiment(const DomainPair& data, Index target_labels,
                           std::optional<Index> target_subset, std::uint64_t seed) {
  Domain target = data.target;
  if (target_subset) {
    const auto idx = random_subset(data.target.size(), *target_subset, seed);
    target = subset_domain(data.target, idx);
  }
  for (int c : target.labels) {
    if (c < 0) throw std::invalid_argument("make_experiment: target truth must be complete");
  }
  Experiment e;
  e.problem.source_points = data.source.points;
  e.problem.target_points = target.points;
  e.problem.class_count = data.class_count;
  for (std::size_t i = 0; i < data.source.labels.size(); ++i) {
    if (data.source.labels[i] >= 0) {
      e.problem.source_labeled.push_back(static_cast<Index>(i));
      e.problem.source_labels.push_back(data.source.labels[i]);
    }
  }
  const LabelMask mask = mask_labels(target.labels, target_labels, seed);
  e.problem.target_labeled = mask.kept;
  for (Index i : mask.kept) e.problem.target_labels.push_back(target.labels[static_cast<std::size_t>(i)]);
  e.evaluation = mask.held_out;
  e.target_truth = target.labels;
  e.problem.validate();
  return e;
}

Metrics misclassification_rate(std::span<const int> predictions, std::span<const int> truth,
                               std::span<const Index> evaluation, int class_count) {
  if (predictions.size() != truth.size()) throw std::invalid_argument("metrics: size mismatch");
  if (evaluation.empty()) throw std::invalid_argument("metrics: empty evaluation set");
  if (class_count < 1) throw std::invalid_argument("metrics: class_count must be positive");
  Metrics m;
  m.confusion.assign(static_cast<std::size_t>(class_count),
                     std::vector<Index>(static_cast<std::size_t>(class_count), 0));
  for (Index i : evaluation) {
    if (i < 0 || i >= static_cast<Index>(truth.size())) throw IndexOutOfRange(i, static_cast<Index>(truth.size()));
    const int t = truth[static_cast<std::size_t>(i)];
    const int p = predictions[static_cast<std::size_t>(i)];
    if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
      throw std::invalid_argument("metrics: class outside [0, class_count)");
    }
    ++m.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    if (t != p) ++m.wrong;
    ++m.total;
  }
  m.rate = static_cast<double>(m.wrong) / static_cast<double>(m.total);
  return m;
}

std::uint64_t fingerprint(const Domain& domain) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  feed(format_features_csv(domain.points));
  feed(format_labels_csv(domain.labels));
  return h;
}

}  // namespace graphda
