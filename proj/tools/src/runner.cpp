#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "graphda/cli.hpp"

namespace graphda::cli {

namespace {

SeedResult run_one(Method method, const DataSource& source, const DomainPair* loaded,
                   const Protocol& protocol, const DaglConfig& config, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  DomainPair generated;
  if (!loaded) {
    auto sc = source.synthetic;
    sc.seed = source.data_seed.value_or(seed);
    generated = generate_synthetic(sc);
  }
  const DomainPair& data = loaded ? *loaded : generated;
  const auto ex = make_experiment(data, protocol.target_labels, protocol.target_subset, seed);
  const auto r = run_method(method, ex, config);

  SeedResult s;
  s.seed = seed;
  s.source_fingerprint = fingerprint(data.source);
  s.target_fingerprint = fingerprint(data.target);
  s.metrics = *r.metrics;
  s.iterations = static_cast<Index>(r.trace.size());
  s.final_objective = r.final_objective;
  s.source_edges = r.source_weights.edge_count();
  s.target_edges = r.target_weights.edge_count();
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

}  // namespace

std::vector<SeedResult> run_seeds(Method method, const DataSource& source, const Protocol& protocol,
                                  const DaglConfig& config, const std::vector<std::uint64_t>& seeds,
                                  unsigned threads, std::ostream* log) {
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  std::optional<DomainPair> loaded;
  if (source.directory) loaded = load_pair(*source.directory);

  std::vector<SeedResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      try {
        results[k] = run_one(method, source, loaded ? &*loaded : nullptr, protocol, config, seeds[k]);
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << method_name(method) << " seed " << seeds[k] << ": error " << results[k].metrics.rate
               << " (" << results[k].metrics.wrong << "/" << results[k].metrics.total << ")\n";
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(std::max(1u, threads), seeds.size());
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // Report the first failure in declared seed order.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<SweepRow> sweep(const std::string& axis, const std::vector<Index>& values,
                            const std::vector<Method>& methods, const DataSource& source,
                            const Protocol& protocol, const DaglConfig& config,
                            const std::vector<std::uint64_t>& seeds, unsigned threads,
                            std::ostream* log) {
  if (axis != "K" && axis != "N" && axis != "Nt") {
    throw std::invalid_argument("unknown sweep axis '" + axis + "' (expected K, N or Nt)");
  }
  if (values.empty()) throw std::invalid_argument("empty sweep value list");
  if (methods.empty()) throw std::invalid_argument("empty method list");
  std::vector<SweepRow> rows;
  for (Index v : values) {
    auto cfg = config;
    auto prot = protocol;
    if (axis == "K") cfg.neighbors = v;
    if (axis == "N") prot.target_labels = v;
    if (axis == "Nt") prot.target_subset = v;
    for (Method m : methods) {
      if (log) *log << axis << " = " << v << "\n";
      const auto results = run_seeds(m, source, prot, cfg, seeds, threads, log);
      rows.push_back({axis, v, m, aggregate(results)});
    }
  }
  return rows;
}

}  // namespace graphda::cli
