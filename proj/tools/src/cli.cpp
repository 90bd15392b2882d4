#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "graphda/cli.hpp"
#include "graphda/errors.hpp"
#include "graphda/manifold.hpp"
#include "graphda/theory.hpp"

namespace graphda::cli {

namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string error_case(const Error& e) {
  if (dynamic_cast<const DisconnectedComponent*>(&e)) return "DisconnectedComponent";
  if (dynamic_cast<const UnreachableNodes*>(&e)) return "UnreachableNodes";
  if (dynamic_cast<const InfeasibleWeights*>(&e)) return "InfeasibleWeights";
  if (dynamic_cast<const IsolatedNode*>(&e)) return "IsolatedNode";
  if (dynamic_cast<const SingularSystem*>(&e)) return "SingularSystem";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const IndexOutOfRange*>(&e)) return "IndexOutOfRange";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  return "Error";
}

bool is_io(const Error& e) {
  return dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const IndexOutOfRange*>(&e);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Output goes to --out atomically when given, else to stdout.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
    out << path << "\n";
  }
}

struct SyntheticFlags {
  SyntheticConfig config;
  std::vector<double> offset;

  void add(CLI::App* app) {
    app->add_option("--n-per-domain", config.n_per_domain, "Samples per domain (even)")->capture_default_str();
    app->add_option("--offset", offset, "Class mean offset, three values")->expected(3)->delimiter(',');
    app->add_option("--std", config.stddev, "Per-dimension standard deviation")->capture_default_str();
    app->add_option("--rotation", config.rotation_degrees, "Target rotation about the third axis, degrees")
        ->capture_default_str();
  }
  SyntheticConfig resolve() const {
    auto c = config;
    if (!offset.empty()) c.offset = Eigen::Vector3d(offset[0], offset[1], offset[2]);
    c.validate();
    return c;
  }
};

// Config file first, then individual flags on top.
struct ConfigFlags {
  std::string path;
  std::vector<std::function<void(DaglConfig&)>> overrides;

  template <class T, class Set>
  void flag(CLI::App* app, const std::string& name, const std::string& help, Set set) {
    app->add_option_function<T>(name, [this, set](const T& v) {
      overrides.push_back([set, v](DaglConfig& c) { set(c, v); });
    }, help);
  }

  void add(CLI::App* app) {
    app->add_option("--config", path, "JSON configuration file");
    flag<double>(app, "--mu", "Coefficient coupling", [](DaglConfig& c, double v) { c.mu = v; });
    flag<double>(app, "--mu-source", "Distance penalty, source graph",
                 [](DaglConfig& c, double v) { c.mu_source = v; });
    flag<double>(app, "--mu-target", "Distance penalty, target graph",
                 [](DaglConfig& c, double v) { c.mu_target = v; });
    flag<Index>(app, "--basis-size", "Number of Fourier basis vectors R",
                [](DaglConfig& c, Index v) { c.basis_size = v; });
    flag<Index>(app, "--neighbors", "K of the initial k-NN graphs",
                [](DaglConfig& c, Index v) { c.neighbors = v; });
    flag<double>(app, "--kernel-width", "Gaussian kernel width (default: automatic)",
                 [](DaglConfig& c, double v) { c.kernel_width = v; });
    flag<double>(app, "--prune", "Pruning threshold W_min",
                 [](DaglConfig& c, double v) { c.prune_threshold = v; });
    flag<double>(app, "--d-min", "Absolute degree lower bound",
                 [](DaglConfig& c, double v) { c.degree_min = v; });
    flag<double>(app, "--d-max", "Absolute degree upper bound",
                 [](DaglConfig& c, double v) { c.degree_max = v; });
    flag<double>(app, "--d-min-scale", "Degree lower bound relative to the mean initial degree",
                 [](DaglConfig& c, double v) { c.degree_min_scale = v; });
    flag<double>(app, "--d-max-scale", "Degree upper bound relative to the mean initial degree",
                 [](DaglConfig& c, double v) { c.degree_max_scale = v; });
    flag<Index>(app, "--iterations", "Graph-learning iterations",
                [](DaglConfig& c, Index v) { c.max_iterations = v; });
    flag<bool>(app, "--align-signs", "Orient target basis vectors by label correlation",
               [](DaglConfig& c, bool v) { c.align_signs = v; });
  }

  DaglConfig resolve() const {
    DaglConfig c;
    if (!path.empty()) {
      Json j;
      try {
        j = Json::parse(read_text(path));
      } catch (const Json::parse_error& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
      }
      c = config_from_json(j, c);
    }
    for (const auto& o : overrides) o(c);
    return c;
  }
};

struct ExperimentFlags {
  SyntheticFlags synthetic;
  ConfigFlags config;
  std::string data_dir;
  std::optional<std::uint64_t> data_seed;
  std::string seeds = "1";
  Index target_labels = 40;
  std::optional<Index> target_subset;
  std::string out;
  bool quiet = false;

  void add(CLI::App* app) {
    app->add_option("--data", data_dir, "Directory with the four dataset CSVs (default: synthetic)");
    app->add_option("--data-seed", data_seed, "Fix the synthetic data seed (default: the repetition seed)");
    synthetic.add(app);
    config.add(app);
    app->add_option("--seeds", seeds, "Repetition seeds, e.g. 1..10 or 1,4,7")->capture_default_str();
    app->add_option("--labels", target_labels, "Labeled target samples N")->capture_default_str();
    app->add_option("--target-subset", target_subset, "Use a random subset of N_t target samples");
    app->add_option("--out", out, "Write the result to this file instead of stdout");
    app->add_flag("--quiet", quiet, "No per-seed log on stderr");
  }

  DataSource source() const {
    DataSource s;
    if (!data_dir.empty()) s.directory = data_dir;
    s.synthetic = synthetic.resolve();
    s.data_seed = data_seed;
    return s;
  }
  Protocol protocol() const { return {target_labels, target_subset}; }

  Json dataset_json() const {
    if (!data_dir.empty()) return Json{{"kind", "csv"}, {"directory", data_dir}};
    const auto c = synthetic.resolve();
    return Json{{"kind", "synthetic"},
                {"n_per_domain", c.n_per_domain},
                {"offset", {c.offset(0), c.offset(1), c.offset(2)}},
                {"stddev", c.stddev},
                {"rotation_degrees", c.rotation_degrees},
                {"data_seed", data_seed ? Json(*data_seed) : Json(nullptr)}};
  }
  Json protocol_json(const std::vector<std::uint64_t>& seed_list) const {
    return Json{{"target_labels", target_labels},
                {"target_subset", target_subset ? Json(*target_subset) : Json(nullptr)},
                {"seeds", seed_list}};
  }
};

Json seed_json(const SeedResult& r, bool timings) {
  Json j{{"seed", r.seed},
         {"source_fingerprint", hex(r.source_fingerprint)},
         {"target_fingerprint", hex(r.target_fingerprint)},
         {"error", r.metrics.rate},
         {"wrong", r.metrics.wrong},
         {"total", r.metrics.total},
         {"confusion", r.metrics.confusion},
         {"iterations", r.iterations},
         {"final_objective", r.final_objective},
         {"source_edges", r.source_edges},
         {"target_edges", r.target_edges}};
  if (timings) j["seconds"] = r.seconds;
  return j;
}

Json aggregate_json(const Aggregate& a) {
  return Json{{"mean", a.mean}, {"std", a.stddev}, {"min", a.min}, {"max", a.max}, {"count", a.count}};
}

Json check_json(const InequalityCheck& c) {
  return Json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}};
}

Json report_json(const BoundReport& r, const InstanceOptions& o) {
  Json layers = Json::array();
  for (const auto& l : r.layers) {
    layers.push_back({{"layer", l.layer}, {"b", l.b}, {"b_hat", l.b_hat}, {"check", check_json(l.check)}});
  }
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  return Json{{"schema_version", kSchemaVersion},
              {"command", "bounds"},
              {"instance",
               {{"family", std::string(to_string(o.family))},
                {"scale", o.scale},
                {"kernel_width", o.kernel_width},
                {"nodes", o.nodes},
                {"neighbors", o.neighbors},
                {"target_labels", o.target_labels},
                {"basis_size", o.basis_size},
                {"mu", o.mu},
                {"seed", o.seed}}},
              {"depth", r.depth},
              {"layer_sizes", r.layer_sizes},
              {"k_min", r.k_min},
              {"k_max", r.k_max},
              {"w_min_layer", r.w_min_layer},
              {"w_min", r.w_min},
              {"kappa", r.kappa},
              {"layers", layers},
              {"a", r.a},
              {"m_source", r.m_source},
              {"m_target", r.m_target},
              {"kernel_lipschitz", r.kernel_lipschitz},
              {"kernel_peak", r.kernel_peak},
              {"epsilon_gamma", r.epsilon_gamma},
              {"delta_w", r.delta_w},
              {"rho_max", r.rho_max},
              {"delta", r.delta},
              {"delta_observed", r.delta_observed},
              {"basis_size", r.basis_size},
              {"effective_basis_size", r.effective_basis_size},
              {"c", r.c},
              {"delta_alpha", r.delta_alpha},
              {"lambda_r", r.lambda_r},
              {"b", r.b},
              {"source_energy", r.source_energy},
              {"b_hat", r.b_hat},
              {"b_hat_observed", r.b_hat_observed},
              {"error", r.error},
              {"bound", r.bound},
              {"fully_labeled", r.fully_labeled},
              {"checks", checks},
              {"all_pass", r.all_pass}};
}

std::vector<Index> to_indices(const std::vector<std::uint64_t>& v) {
  std::vector<Index> out;
  for (auto x : v) out.push_back(static_cast<Index>(x));
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(parse_method(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-learning domain adaptation experiments", "graphda"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic source/target dataset as CSV");
  bool synthetic = false;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  SyntheticFlags gen_flags;
  gen->add_flag("--synthetic", synthetic, "Two-class Gaussian data (the only generator)")->required();
  gen->add_option("--seed", gen_seed, "Data seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen_flags.add(gen);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one method over several seeds; JSON record on stdout");
  ExperimentFlags run_flags;
  std::string method;
  bool timings = false;
  run_cmd->add_option("--method", method, "sda or sda-dagl")->required();
  run_cmd->add_flag("--timings", timings, "Include wall-clock timings in the record");
  run_flags.add(run_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Mean error per swept value and method; CSV on stdout");
  ExperimentFlags sweep_flags;
  std::string axis, values, methods = "sda,sda-dagl";
  sweep_cmd->add_option("--axis", axis, "K, N or Nt")->required();
  sweep_cmd->add_option("--values", values, "Values to sweep, e.g. 5,10,20")->required();
  sweep_cmd->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  sweep_flags.add(sweep_cmd);

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the error bound on a paired-manifold instance");
  InstanceOptions inst;
  std::string family, bounds_out;
  bounds_cmd->add_option("--family", family, "identity, rotation or scale")->required();
  bounds_cmd->add_option("--n", inst.nodes, "Nodes per domain")->capture_default_str();
  bounds_cmd->add_option("--seed", inst.seed, "Sample seed")->capture_default_str();
  bounds_cmd->add_option("--c", inst.scale, "Scale factor of the scale family")->capture_default_str();
  bounds_cmd->add_option("--sigma", inst.kernel_width, "Kernel width")->capture_default_str();
  bounds_cmd->add_option("--neighbors", inst.neighbors, "K of the k-NN graphs")->capture_default_str();
  bounds_cmd->add_option("--labels", inst.target_labels, "Labeled target nodes")->capture_default_str();
  bounds_cmd->add_option("--basis-size", inst.basis_size, "R")->capture_default_str();
  bounds_cmd->add_option("--mu", inst.mu, "Coefficient coupling")->capture_default_str();
  bounds_cmd->add_option("--out", bounds_out, "Write the report to this file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      auto sc = gen_flags.resolve();
      sc.seed = gen_seed;
      save_pair(generate_synthetic(sc), gen_out);
      for (const auto& f : pair_files(gen_out)) out << f << "\n";
      return kOk;
    }

    if (run_cmd->parsed()) {
      const auto start = Clock::now();
      const Method m = parse_method(method);
      const auto cfg = run_flags.config.resolve();
      const auto seed_list = parse_id_list(run_flags.seeds);
      const auto results = run_seeds(m, run_flags.source(), run_flags.protocol(), cfg, seed_list,
                                     thread_budget(), run_flags.quiet ? nullptr : &err);
      Json record{{"schema_version", kSchemaVersion},
                  {"command", "run"},
                  {"method", method_name(m)},
                  {"config", config_to_json(cfg)},
                  {"dataset", run_flags.dataset_json()},
                  {"protocol", run_flags.protocol_json(seed_list)}};
      Json runs = Json::array();
      for (const auto& r : results) runs.push_back(seed_json(r, timings));
      record["runs"] = runs;
      record["aggregate"] = aggregate_json(aggregate(results));
      if (timings) {
        record["timings"] = {{"total_seconds", std::chrono::duration<double>(Clock::now() - start).count()},
                             {"threads", thread_budget()}};
      }
      emit(record.dump(2) + "\n", run_flags.out, out);
      return kOk;
    }

    if (sweep_cmd->parsed()) {
      const auto vals = to_indices(parse_id_list(values));
      const auto ms = parse_methods(methods);
      const auto cfg = sweep_flags.config.resolve();
      const auto seed_list = parse_id_list(sweep_flags.seeds);
      const auto rows = sweep(axis, vals, ms, sweep_flags.source(), sweep_flags.protocol(), cfg, seed_list,
                              thread_budget(), sweep_flags.quiet ? nullptr : &err);
      emit(format_sweep_csv(rows), sweep_flags.out, out);
      return kOk;
    }

    if (bounds_cmd->parsed()) {
      inst.family = parse_family(family);
      const auto report = theorem1_bound(make_theorem_instance(inst));
      emit(report_json(report, inst).dump(2) + "\n", bounds_out, out);
      if (!report.all_pass) {
        for (const auto& c : report.checks) {
          if (!c.pass) err << "check failed: " << c.name << " (" << c.lhs << " > " << c.rhs << ")\n";
        }
        return kTheoremCheck;
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error [" << error_case(e) << "]: " << e.what() << "\n";
    return is_io(e) ? kIo : kSolver;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}

}  // namespace graphda::cli
