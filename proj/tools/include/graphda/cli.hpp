#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphda/data.hpp"
#include "graphda/pipeline.hpp"
#include "json.hpp"

namespace graphda::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kSolver = 4,
  kTheoremCheck = 5,
};

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1..10", "1,2,5", "1..3,8". Throws std::invalid_argument on empty or
/// malformed lists and on descending ranges.
std::vector<std::uint64_t> parse_id_list(const std::string& text);

std::string method_name(Method method);
/// "sda" or "sda-dagl"; throws std::invalid_argument otherwise.
Method parse_method(const std::string& name);

nlohmann::json config_to_json(const DaglConfig& config);
/// Applies the keys of `j` on top of `base`. Unknown keys and wrong types
/// throw std::invalid_argument.
DaglConfig config_from_json(const nlohmann::json& j, DaglConfig base = {});

/// Where the samples of one repetition come from.
struct DataSource {
  std::optional<std::string> directory;  // four CSVs; empty means synthetic
  SyntheticConfig synthetic;
  std::optional<std::uint64_t> data_seed;  // synthetic only; default: the repetition seed
};

/// Loads <dir>/{source,target}_{features,labels}.csv.
DomainPair load_pair(const std::string& directory);
void save_pair(const DomainPair& pair, const std::string& directory);
/// File names written by save_pair, in a fixed order.
std::vector<std::string> pair_files(const std::string& directory);

struct Protocol {
  Index target_labels = 40;
  std::optional<Index> target_subset;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::uint64_t source_fingerprint = 0;
  std::uint64_t target_fingerprint = 0;
  Metrics metrics;
  Index iterations = 0;
  double final_objective = 0.0;
  Index source_edges = 0;
  Index target_edges = 0;
  double seconds = 0.0;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one seed
  double min = 0.0;
  double max = 0.0;
  Index count = 0;
};

Aggregate aggregate(const std::vector<SeedResult>& results);

/// One repetition per seed. Results come back in seed order; independent
/// seeds run on up to `threads` workers.
std::vector<SeedResult> run_seeds(Method method, const DataSource& source, const Protocol& protocol,
                                  const DaglConfig& config, const std::vector<std::uint64_t>& seeds,
                                  unsigned threads, std::ostream* log);

/// Worker cap from GRAPHDA_THREADS, else the number of logical cores.
unsigned thread_budget();

struct SweepRow {
  std::string axis;
  Index value = 0;
  Method method = Method::Sda;
  Aggregate error;
};

/// Axis "K" (neighbors), "N" (target labels) or "Nt" (target subset size).
std::vector<SweepRow> sweep(const std::string& axis, const std::vector<Index>& values,
                            const std::vector<Method>& methods, const DataSource& source,
                            const Protocol& protocol, const DaglConfig& config,
                            const std::vector<std::uint64_t>& seeds, unsigned threads,
                            std::ostream* log);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);
/// Parses what format_sweep_csv writes. Throws ParseError.
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace graphda::cli
