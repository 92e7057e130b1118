// Copyright 2026 The gridrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gridrank/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace gridrank {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// One INI section; remembers which keys were read so leftovers can be
// reported as typos.
class Section {
 public:
  Section(std::string name, const pt::ptree& node) : name_(std::move(name)), node_(node) {}

  const std::string& name() const { return name_; }

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    auto child = node_.get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  std::string required(const std::string& key) {
    auto v = text(key);
    if (!v || v->empty()) fail(key, "is required");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    auto v = text(key);
    return v ? parse_number(key, *v) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    return parse_number(key, *v);
  }

  long long integer(const std::string& key, long long fallback) {
    auto v = text(key);
    if (!v) return fallback;
    try {
      std::size_t pos = 0;
      const long long n = std::stoll(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return n;
    } catch (const std::exception&) {
      fail(key, fmt::format("'{}' is not an integer", *v));
    }
  }

  bool flag(const std::string& key, bool fallback) {
    auto v = text(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes") return true;
    if (*v == "0" || *v == "false" || *v == "no") return false;
    fail(key, fmt::format("'{}' is not a boolean", *v));
  }

  void finish() const {
    for (const auto& [key, _] : node_) {
      if (!used_.contains(key)) fail(key, "is not a recognized key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(fmt::format("[{}] {}: {}", name_, key, what));
  }

 private:
  double parse_number(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      fail(key, fmt::format("'{}' is not a number", v));
    }
  }

  std::string name_;
  const pt::ptree& node_;
  std::set<std::string> used_;
};

pt::ptree read_ini(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  for (const auto& [key, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      throw ConfigError(fmt::format("{}: key '{}' outside of any section", source, key));
    }
  }
  return tree;
}

std::ifstream open_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open", path.string()));
  return in;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

constexpr double kHour = kSecondsPerHour;

ArrivalMode parse_arrival(Section& s) {
  const std::string mode = s.text("arrival").value_or("batch");
  if (mode == "batch") return ArrivalMode::kBatch;
  if (mode == "poisson") return ArrivalMode::kPoisson;
  if (mode == "sweeps") return ArrivalMode::kSweeps;
  s.fail("arrival", fmt::format("'{}' is not one of batch, poisson, sweeps", mode));
}

WorkloadSpec parse_workload_spec(Section& s) {
  WorkloadSpec spec;
  const long long jobs = s.integer("jobs", 0);
  if (jobs < 0) s.fail("jobs", "must be >= 0");
  spec.jobs = static_cast<std::size_t>(jobs);
  spec.arrival = parse_arrival(s);
  spec.mean_interarrival = s.number("mean_interarrival_h", 0) * kHour;
  const long long sweep = s.integer("sweep_size", 1);
  if (sweep < 1) s.fail("sweep_size", "must be >= 1");
  spec.sweep_size = static_cast<std::size_t>(sweep);
  spec.work_median = s.number("work_median_flops", 0);
  spec.work_sigma = s.number("work_sigma", 0);
  if (auto c = s.text("required_class"); c && !c->empty()) spec.required_class = ResourceClass{*c};
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[{}] {}", s.name(), e.what()));
  }
  return spec;
}

ChurnClassModel parse_churn_class(Section& s, const ChurnClassModel& base) {
  ChurnClassModel m = base;
  if (auto f = s.text("family")) {
    if (*f == "always") {
      m.family = ChurnFamily::kAlways;
    } else if (*f == "exponential") {
      m.family = ChurnFamily::kExponential;
    } else if (*f == "weibull") {
      m.family = ChurnFamily::kWeibull;
    } else {
      s.fail("family", fmt::format("'{}' is not one of always, exponential, weibull", *f));
    }
  }
  m.mean_up = s.number("mean_up_h", m.mean_up / kHour) * kHour;
  m.mean_down = s.number("mean_down_h", m.mean_down / kHour) * kHour;
  m.shape = s.number("shape", m.shape);
  m.heterogeneity = s.number("heterogeneity", m.heterogeneity);
  m.random_phase = s.flag("random_phase", m.random_phase);
  return m;
}

std::vector<ClusterQueue> parse_queues(Section& s) {
  std::vector<ClusterQueue> out;
  const auto text = s.text("queues");
  if (!text) return out;
  for (const auto& item : split_list(*text)) {
    const auto parts = split_list(item, ':');
    if (parts.size() != 3) s.fail("queues", fmt::format("'{}' is not name:limit_h:priority", item));
    try {
      out.push_back({parts[0], std::stod(parts[1]) * kHour, std::stoi(parts[2])});
    } catch (const std::exception&) {
      s.fail("queues", fmt::format("'{}' is not name:limit_h:priority", item));
    }
  }
  return out;
}

CatalogSource parse_catalog_source(Section& s, const fs::path& base, bool required) {
  CatalogSource src;
  const bool top = s.name() == "catalog";
  auto path = s.text(top ? "path" : "catalog");
  auto spec = s.text(top ? "spec" : "catalog_spec");
  if (path && spec) s.fail("spec", "give either a catalog path or a spec, not both");
  if (path) {
    src.path = resolve(base, *path);
  } else if (spec) {
    src.path = resolve(base, *spec);
    src.synthetic = true;
    const long long seed = s.integer(top ? "seed" : "catalog_seed", 0);
    if (seed < 0) s.fail("seed", "must be >= 0");
    src.seed = static_cast<std::uint64_t>(seed);
  } else if (required) {
    s.fail("path", "a catalog path or spec is required");
  }
  return src;
}

bool valid_label(const std::string& label) {
  return !label.empty() && std::ranges::all_of(label, [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir) {
  const pt::ptree tree = read_ini(in, "config");
  ExperimentConfig cfg;
  bool saw_experiment = false, saw_catalog = false, saw_workload = false;
  std::vector<std::pair<std::string, const pt::ptree*>> churn_classes;

  for (const auto& [name, node] : tree) {
    Section s(name, node);
    if (name == "experiment") {
      saw_experiment = true;
      cfg.name = s.text("name").value_or("experiment");
      cfg.horizon = s.number("horizon_h", 0) * kHour;
      cfg.sweep_interval = s.number("sweep_interval_s", 0);
      for (const auto& item : split_list(s.text("seeds").value_or(""))) {
        try {
          std::size_t pos = 0;
          const unsigned long long v = std::stoull(item, &pos);
          if (pos != item.size()) throw std::invalid_argument("trailing");
          cfg.seeds.push_back(v);
        } catch (const std::exception&) {
          s.fail("seeds", fmt::format("'{}' is not a seed", item));
        }
      }
      if (auto out = s.text("output_dir")) cfg.output_dir = resolve(base_dir, *out);
    } else if (name == "catalog") {
      saw_catalog = true;
      cfg.catalog = parse_catalog_source(s, base_dir, true);
    } else if (name == "workload") {
      saw_workload = true;
      if (auto path = s.text("path")) {
        cfg.workload = resolve(base_dir, *path);
      } else {
        cfg.workload = parse_workload_spec(s);
      }
    } else if (name == "churn") {
      cfg.churn.fallback = parse_churn_class(s, ChurnClassModel{});
    } else if (name.starts_with("churn:")) {
      churn_classes.emplace_back(name, &node);
      continue;  // parsed once the default is known
    } else if (name.starts_with("arm:")) {
      ArmConfig arm;
      arm.label = name.substr(4);
      if (!valid_label(arm.label)) {
        throw ConfigError(fmt::format("[{}]: arm labels use letters, digits, '-' and '_'", name));
      }
      try {
        arm.policy.kind = parse_policy_kind(s.required("policy"));
      } catch (const std::invalid_argument& e) {
        s.fail("policy", e.what());
      }
      auto& w = arm.policy.weights;
      w.w1 = s.number("w1", w.w1);
      w.w2 = s.number("w2", w.w2);
      w.w3 = s.number("w3", w.w3);
      auto& p = arm.policy.params;
      p.rbase = s.number("rbase", p.rbase);
      p.ra_max = s.number("ra_max", p.ra_max);
      p.ra_rate = s.number("ra_rate_per_h", p.ra_rate);
      p.js_init = s.number("js_init", p.js_init);
      p.reward = s.number("reward", p.reward);
      p.penalty = s.number("penalty", p.penalty);
      p.js_min = s.number("js_min", p.js_min);
      p.js_max = s.number("js_max", p.js_max);
      arm.policy.queues = parse_queues(s);
      arm.policy.estimate_factor = s.optional_number("estimate_factor");
      if (auto src = parse_catalog_source(s, base_dir, false); !src.path.empty()) arm.catalog = src;
      try {
        validate(w);
        validate(p);
        if (arm.policy.kind == PolicyKind::kCluster) validate_queues(arm.policy.queues);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("[{}] {}", name, e.what()));
      }
      if (std::ranges::any_of(cfg.arms, [&](const ArmConfig& a) { return a.label == arm.label; })) {
        throw ConfigError(fmt::format("[{}]: duplicate arm", name));
      }
      cfg.arms.push_back(std::move(arm));
    } else {
      throw ConfigError(fmt::format("[{}]: unknown section", name));
    }
    s.finish();
  }
  for (const auto& [name, node] : churn_classes) {
    Section s(name, *node);
    cfg.churn.per_class[name.substr(6)] = parse_churn_class(s, cfg.churn.fallback);
    s.finish();
  }
  if (!saw_experiment) throw ConfigError("missing [experiment] section");
  if (!saw_catalog) throw ConfigError("missing [catalog] section");
  if (!saw_workload) throw ConfigError("missing [workload] section");
  try {
    validate(cfg.churn);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[churn] {}", e.what()));
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  auto in = open_config(path);
  try {
    return parse_config(in, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void validate(const ExperimentConfig& config) {
  if (config.arms.empty()) throw ConfigError("experiment has no arms");
  if (config.seeds.empty()) throw ConfigError("experiment has no seeds");
  if (!(config.horizon > 0)) throw ConfigError("horizon must be > 0");
  if (config.sweep_interval < 0) throw ConfigError("sweep interval must be >= 0");
}

CatalogSpec load_catalog_spec(const fs::path& path) {
  auto in = open_config(path);
  const pt::ptree tree = read_ini(in, path.string());
  CatalogSpec spec;
  for (const auto& [name, node] : tree) {
    if (!name.starts_with("class:")) {
      throw ConfigError(fmt::format("{}: [{}]: expected [class:LABEL] sections", path.string(), name));
    }
    Section s(name, node);
    ClassSpec c;
    c.label = name.substr(6);
    c.count = static_cast<int>(s.integer("count", 0));
    c.nflops = s.number("nflops", 0);
    c.ncores = static_cast<int>(s.integer("ncores", 1));
    c.dedicated = s.flag("dedicated", false);
    c.nflops_jitter = s.number("nflops_jitter", 0);
    c.name_prefix = s.text("prefix").value_or("");
    s.finish();
    if (c.count < 0 || !(c.nflops > 0) || c.ncores < 1 || c.nflops_jitter < 0 || c.nflops_jitter >= 1) {
      throw ConfigError(fmt::format("{}: [{}]: invalid class parameters", path.string(), name));
    }
    spec.classes.push_back(std::move(c));
  }
  if (spec.classes.empty()) throw ConfigError(fmt::format("{}: no [class:LABEL] sections", path.string()));
  return spec;
}

WorkloadSpec load_workload_spec(const fs::path& path) {
  auto in = open_config(path);
  const pt::ptree tree = read_ini(in, path.string());
  auto node = tree.get_child_optional("workload");
  if (!node) throw ConfigError(fmt::format("{}: missing [workload] section", path.string()));
  Section s("workload", *node);
  WorkloadSpec spec = parse_workload_spec(s);
  s.finish();
  return spec;
}

std::vector<ResourceRecord> materialize(const CatalogSource& source) {
  if (!source.synthetic) return load_catalog(source.path);
  return generate_catalog(load_catalog_spec(source.path), source.seed);
}

std::vector<ArmRun> run_arms(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  const std::vector<ResourceRecord> grid = materialize(config.catalog);
  std::vector<std::vector<ResourceRecord>> catalogs;
  for (const auto& arm : config.arms) {
    catalogs.push_back(arm.catalog ? materialize(*arm.catalog) : grid);
  }
  std::optional<std::vector<JobRecord>> fixed_workload;
  if (const auto* path = std::get_if<fs::path>(&config.workload)) {
    const auto classes = classes_of(grid);
    fixed_workload = load_workload(*path, std::span<const ResourceClass>(classes));
  }

  struct Task {
    std::size_t arm;
    std::size_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t a = 0; a < config.arms.size(); ++a) {
    for (std::size_t s = 0; s < config.seeds.size(); ++s) tasks.push_back({a, s});
  }
  std::vector<ArmRun> runs(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

  auto work = [&](std::size_t t) {
    const auto [a, s] = tasks[t];
    const ArmConfig& arm = config.arms[a];
    const std::uint64_t seed = config.seeds[s];
    const auto start = std::chrono::steady_clock::now();
    const std::vector<JobRecord> workload =
        fixed_workload ? *fixed_workload
                       : generate_workload(std::get<WorkloadSpec>(config.workload), seed);
    auto policy = make_policy(arm.policy, catalogs[a]);
    EngineOptions options;
    options.horizon = config.horizon;
    options.sweep_interval = config.sweep_interval;
    ArmRun& run = runs[t];
    run.label = arm.label;
    run.seed = seed;
    run.result = gridrank::run(catalogs[a], workload, *policy, config.churn, options, seed);
    run.report = compute_report(run.result, arm.label);
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        work(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

ComparisonTable aggregate(std::span<const ArmRun> runs) {
  std::vector<std::string> order;
  for (const auto& r : runs) {
    if (std::ranges::find(order, r.label) == order.end()) order.push_back(r.label);
  }
  std::vector<ArmSummary> rows;
  for (const auto& label : order) {
    std::vector<MetricsReport> reports;
    for (const auto& r : runs) {
      if (r.label == label) reports.push_back(r.report);
    }
    rows.push_back(summarize(reports));
  }
  return compare(rows);
}

std::string output_stem(std::size_t arm_index, const std::string& label, std::size_t seed_index) {
  return fmt::format("{:02d}-{}.s{:03d}", arm_index, label, seed_index);
}

namespace {

// Removes everything it wrote unless disarmed.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  template <typename Fn>
  void write(const std::string& name, Fn&& body) {
    const fs::path path = dir_ / name;
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
    body(out);
    if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

}  // namespace

ComparisonTable run_experiment(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  if (config.output_dir.empty()) throw ConfigError("no output directory configured");
  OutputGuard guard(config.output_dir);
  const std::vector<ArmRun> runs = run_arms(config, threads);
  for (std::size_t t = 0; t < runs.size(); ++t) {
    const std::size_t a = t / config.seeds.size();
    const std::size_t s = t % config.seeds.size();
    const std::string stem = output_stem(a, runs[t].label, s);
    guard.write(stem + ".result", [&](std::ostream& out) {
      write_result(out, runs[t].result, runs[t].label, runs[t].seed);
    });
    guard.write(stem + ".report.csv", [&](std::ostream& out) { write_report(out, runs[t].report); });
  }
  ComparisonTable table = aggregate(runs);
  guard.write("aggregate.csv", [&](std::ostream& out) { write_aggregate(out, table); });
  guard.commit();
  return table;
}

ComparisonTable report_directory(const fs::path& results, const std::optional<fs::path>& out_dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(results)) {
    for (const auto& entry : fs::directory_iterator(results)) {
      if (entry.is_regular_file() && entry.path().extension() == ".result") files.push_back(entry.path());
    }
  }
  if (files.empty()) throw ConfigError(fmt::format("{}: no results found", results.string()));
  std::ranges::sort(files);

  std::vector<ArmRun> runs;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw ConfigError(fmt::format("{}: cannot open", f.string()));
    StoredResult stored = read_result(in, f.string());
    ArmRun run;
    run.label = stored.label;
    run.seed = stored.seed;
    run.report = compute_report(stored.result, stored.label);
    run.result = std::move(stored.result);
    runs.push_back(std::move(run));
  }
  ComparisonTable table = aggregate(runs);
  if (out_dir) {
    OutputGuard guard(*out_dir);
    for (std::size_t i = 0; i < files.size(); ++i) {
      guard.write(files[i].stem().string() + ".report.csv",
                  [&](std::ostream& out) { write_report(out, runs[i].report); });
    }
    guard.write("aggregate.csv", [&](std::ostream& out) { write_aggregate(out, table); });
    guard.commit();
  }
  return table;
}

}  // namespace gridrank
