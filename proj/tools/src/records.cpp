#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "graphda/cli.hpp"
#include "graphda/errors.hpp"

namespace graphda::cli {

namespace {

template <class T>
T parse_integer(std::string_view s, const char* what) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != end) {
    throw std::invalid_argument(std::string("malformed ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_id_list(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty list");
  std::vector<std::uint64_t> out;
  for (auto item : split_commas(text)) {
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_integer<std::uint64_t>(item, "list entry"));
      continue;
    }
    const auto lo = parse_integer<std::uint64_t>(item.substr(0, dots), "range start");
    const auto hi = parse_integer<std::uint64_t>(item.substr(dots + 2), "range end");
    if (hi < lo) throw std::invalid_argument("descending range '" + std::string(item) + "'");
    if (hi - lo > 1000000) throw std::invalid_argument("range too long");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::string method_name(Method method) { return method == Method::Sda ? "sda" : "sda-dagl"; }

Method parse_method(const std::string& name) {
  if (name == "sda") return Method::Sda;
  if (name == "sda-dagl") return Method::SdaDagl;
  throw std::invalid_argument("unknown method '" + name + "' (expected sda or sda-dagl)");
}

nlohmann::json config_to_json(const DaglConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["mu"] = c.mu;
  j["mu_source"] = c.mu_source;
  j["mu_target"] = c.mu_target;
  j["basis_size"] = c.basis_size;
  j["neighbors"] = c.neighbors;
  j["kernel_width"] = opt(c.kernel_width);
  j["prune_threshold"] = c.prune_threshold;
  j["degree_min"] = opt(c.degree_min);
  j["degree_min_scale"] = c.degree_min_scale;
  j["degree_max"] = opt(c.degree_max);
  j["degree_max_scale"] = c.degree_max_scale;
  j["max_iterations"] = c.max_iterations;
  j["align_signs"] = c.align_signs;
  return j;
}

DaglConfig config_from_json(const nlohmann::json& j, DaglConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  auto opt = [](const nlohmann::json& v) {
    return v.is_null() ? std::optional<double>{} : std::optional<double>{v.get<double>()};
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "schema_version") {
        if (v.get<int>() != kSchemaVersion) throw std::invalid_argument("config: unsupported schema_version");
      } else if (key == "mu") {
        c.mu = v.get<double>();
      } else if (key == "mu_source") {
        c.mu_source = v.get<double>();
      } else if (key == "mu_target") {
        c.mu_target = v.get<double>();
      } else if (key == "basis_size") {
        c.basis_size = v.get<Index>();
      } else if (key == "neighbors") {
        c.neighbors = v.get<Index>();
      } else if (key == "kernel_width") {
        c.kernel_width = opt(v);
      } else if (key == "prune_threshold") {
        c.prune_threshold = v.get<double>();
      } else if (key == "degree_min") {
        c.degree_min = opt(v);
      } else if (key == "degree_min_scale") {
        c.degree_min_scale = v.get<double>();
      } else if (key == "degree_max") {
        c.degree_max = opt(v);
      } else if (key == "degree_max_scale") {
        c.degree_max_scale = v.get<double>();
      } else if (key == "max_iterations") {
        c.max_iterations = v.get<Index>();
      } else if (key == "align_signs") {
        c.align_signs = v.get<bool>();
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

std::vector<std::string> pair_files(const std::string& directory) {
  const std::filesystem::path d(directory);
  return {(d / "source_features.csv").string(), (d / "source_labels.csv").string(),
          (d / "target_features.csv").string(), (d / "target_labels.csv").string()};
}

DomainPair load_pair(const std::string& directory) {
  const auto f = pair_files(directory);
  DomainPair p;
  p.source = load_csv_dataset(f[0], f[1]);
  p.target = load_csv_dataset(f[2], f[3]);
  int classes = 0;
  for (const auto* d : {&p.source, &p.target}) {
    for (int c : d->labels) classes = std::max(classes, c + 1);
  }
  p.class_count = std::max(classes, 1);
  if (p.source.points.cols() != p.target.points.cols()) {
    throw IoError("source and target feature dimensions differ in " + directory);
  }
  return p;
}

void save_pair(const DomainPair& pair, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory + ": " + ec.message());
  const auto f = pair_files(directory);
  save_csv_dataset(pair.source, f[0], f[1]);
  save_csv_dataset(pair.target, f[2], f[3]);
}

Aggregate aggregate(const std::vector<SeedResult>& results) {
  Aggregate a;
  a.count = static_cast<Index>(results.size());
  if (results.empty()) return a;
  a.min = INFINITY;
  a.max = -INFINITY;
  double sum = 0.0;
  for (const auto& r : results) {
    sum += r.metrics.rate;
    a.min = std::min(a.min, r.metrics.rate);
    a.max = std::max(a.max, r.metrics.rate);
  }
  a.mean = sum / static_cast<double>(a.count);
  if (a.count > 1) {
    double ss = 0.0;
    for (const auto& r : results) ss += (r.metrics.rate - a.mean) * (r.metrics.rate - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(a.count - 1));
  }
  return a;
}

unsigned thread_budget() {
  if (const char* env = std::getenv("GRAPHDA_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec == std::errc{} && r.ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "axis,value,method,mean_error,std_error,seeds\n";
  for (const auto& r : rows) {
    s += r.axis + "," + std::to_string(r.value) + "," + method_name(r.method) + "," +
         format_double(r.error.mean) + "," + format_double(r.error.stddev) + "," +
         std::to_string(r.error.count) + "\n";
  }
  return s;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<SweepRow> rows;
  std::size_t ln = 0;
  auto fail = [&](const std::string& why) { throw ParseError("<sweep>", ln, why); };
  while (std::getline(in, line)) {
    ++ln;
    if (ln == 1) {
      if (line != "axis,value,method,mean_error,std_error,seeds") fail("unexpected header");
      continue;
    }
    const auto f = split_commas(line);
    if (f.size() != 6) fail("expected 6 fields");
    SweepRow r;
    r.axis = std::string(f[0]);
    try {
      r.value = parse_integer<Index>(f[1], "value");
      r.method = parse_method(std::string(f[2]));
      r.error.count = parse_integer<Index>(f[5], "seed count");
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    for (auto [field, target] : {std::pair{f[3], &r.error.mean}, std::pair{f[4], &r.error.stddev}}) {
      const auto res = std::from_chars(field.data(), field.data() + field.size(), *target);
      if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) fail("malformed number");
    }
    rows.push_back(r);
  }
  if (ln == 0) fail("empty table");
  return rows;
}

}  // namespace graphda::cli
