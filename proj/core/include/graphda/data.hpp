#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphda/sda.hpp"

namespace graphda {

/// Samples of one domain with their classes; -1 marks an unlabeled sample.
struct Domain {
  Eigen::MatrixXd points;  // n x dim
  std::vector<int> labels;

  Index size() const noexcept { return points.rows(); }
  friend bool operator==(const Domain& a, const Domain& b) {
    return a.points == b.points && a.labels == b.labels;
  }
};

/// Fully labeled source and target sets.
struct DomainPair {
  Domain source;
  Domain target;
  int class_count = 2;
};

/// Two-class Gaussian data in R^3. Class 0 is centered at -offset and class 1
/// at +offset in the source; target samples are drawn from the same mixture
/// and then rotated by `rotation_degrees` about the third axis.
struct SyntheticConfig {
  Index n_per_domain = 200;
  Eigen::Vector3d offset{1.5, 0.0, 0.0};
  double stddev = 1.0;
  double rotation_degrees = 90.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Samples 0 .. n/2-1 are class 0, the rest class 1, in both domains.
DomainPair generate_synthetic(const SyntheticConfig& config);

/// Reads a features CSV (one sample per row, comma-separated floats) and a
/// labels CSV ("sample_index,class_id" rows, class -1 for unlabeled).
/// Samples missing from the labels file are unlabeled.
/// Throws IoError, ParseError (with the line number) or IndexOutOfRange.
Domain load_csv_dataset(const std::string& features_path, const std::string& labels_path,
                        bool skip_header = false);

/// Writes both CSVs with 17 significant digits and '\n' line endings. Every
/// sample gets a labels row. Files are replaced atomically.
void save_csv_dataset(const Domain& domain, const std::string& features_path,
                      const std::string& labels_path);

std::string format_features_csv(const Eigen::MatrixXd& points);
std::string format_labels_csv(std::span<const int> labels);

/// Writes to a temporary file next to `path` and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

struct LabelMask {
  std::vector<Index> kept;      // sorted sample indices that keep their label
  std::vector<Index> held_out;  // sorted labeled indices whose label is hidden
};

/// Random subset of the labeled samples (labels >= 0) of size keep_count.
/// Stratified: every class first gets one label when keep_count allows, the
/// rest is split in proportion to the remaining class sizes (largest
/// remainder, ties to the lower class), and members are drawn uniformly
/// without replacement. Deterministic in seed.
/// Throws std::invalid_argument when keep_count exceeds the labeled count.
LabelMask mask_labels(std::span<const int> labels, Index keep_count, std::uint64_t seed);

/// keep_count = round(ratio * labeled count).
LabelMask mask_labels_ratio(std::span<const int> labels, double keep_ratio, std::uint64_t seed);

/// Sorted uniform subset of {0..n-1} of size count.
std::vector<Index> random_subset(Index n, Index count, std::uint64_t seed);

/// Rows `indices` of a domain.
Domain subset_domain(const Domain& domain, std::span<const Index> indices);

/// Problem for one experiment repetition plus the hidden target truth.
struct Experiment {
  LabelProblem problem;
  std::vector<int> target_truth;   // full target classes (after subsetting)
  std::vector<Index> evaluation;   // unlabeled target nodes, sorted
};

/// Source keeps every label. The target is optionally reduced to a random
/// subset of `target_subset` samples and then keeps `target_labels` labels.
Experiment make_experiment(const DomainPair& data, Index target_labels,
                           std::optional<Index> target_subset, std::uint64_t seed);

struct Metrics {
  double rate = 0.0;
  Index wrong = 0;
  Index total = 0;
  std::vector<std::vector<Index>> confusion;  // [true class][predicted class]
};

/// Error over `evaluation`. Throws std::invalid_argument for an empty set
/// or mismatched sizes.
Metrics misclassification_rate(std::span<const int> predictions, std::span<const int> truth,
                               std::span<const Index> evaluation, int class_count);

/// FNV-1a over the serialized CSV form of the points and labels.
std::uint64_t fingerprint(const Domain& domain);

}  // namespace graphda
