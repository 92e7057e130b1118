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


// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <unistd.h>

#include <fmt/format.h>

#include "gridrank/experiment.hpp"
#include "gridrank/metrics.hpp"
#include "gridrank/simulator.hpp"
#include "properties.hpp"
#include "reference.hpp"

using namespace gridrank;
using namespace gridrank::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kH = kSecondsPerHour;
const fs::path kData = GRIDRANK_DATA_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ArmStats {
  double mean = 0;
  double wall = 0;  // summed over seeds
};

struct Experiment {
  ExperimentConfig config;
  std::map<PolicyKind, ArmStats> arms;
  std::size_t total_jobs = 0;
  std::string table;
};

Experiment run_shipped(const std::string& name) {
  Experiment e;
  e.config = load_config(kData / (name + ".config"));
  const auto runs = run_arms(e.config);
  const ComparisonTable table = aggregate(runs);
  e.table = render(table);
  for (const auto& row : table.rows) e.arms[row.policy].mean = row.throughput_mean;
  for (std::size_t a = 0; a < e.config.arms.size(); ++a) {
    for (const auto& r : runs) {
      if (r.label == e.config.arms[a].label) e.arms[e.config.arms[a].policy.kind].wall += r.wall_seconds;
    }
  }
  e.total_jobs = runs.front().report.total;
  return e;
}

std::string walls(const Experiment& e) {
  return fmt::format("wall grv {:.1f}s fcfs {:.1f}s cluster {:.1f}s", e.arms.at(PolicyKind::kGrv).wall,
                     e.arms.at(PolicyKind::kFcfs).wall, e.arms.at(PolicyKind::kCluster).wall);
}

bool within_budget(const Experiment& e) {
  for (const auto& [kind, stats] : e.arms) {
    if (stats.wall > 60) return false;
  }
  return true;
}

Verdict criterion1() {
  const Experiment e = run_shipped("table2_case1");
  const auto& c = e.config;
  const auto catalog = materialize(c.catalog);
  const auto& spec = std::get<WorkloadSpec>(c.workload);
  const auto& desk = c.churn.for_class(ResourceClass{"INTEL/WINNT5"});
  double desk_speed = 0;
  std::size_t desks = 0;
  for (const auto& r : catalog) {
    if (r.resource_class.label == "INTEL/WINNT5") {
      desk_speed += r.speed();
      ++desks;
    }
  }
  desk_speed /= static_cast<double>(desks);
  const double typical_runtime = spec.work_median / desk_speed;
  const bool shape = catalog.size() == 546 && e.total_jobs == 6004 && c.seeds.size() >= 5 &&
                     desk.mean_up < typical_runtime;

  const double grv = e.arms.at(PolicyKind::kGrv).mean;
  const double fcfs = e.arms.at(PolicyKind::kFcfs).mean;
  const double cluster = e.arms.at(PolicyKind::kCluster).mean;
  const bool pass = shape && grv - fcfs >= 5 && cluster > grv && cluster > fcfs && within_budget(e);
  std::cout << e.table;
  return {pass, fmt::format("{} seeds, desktop mean up {:.1f} h vs median runtime {:.2f} h; grv {} "
                            "fcfs {} cluster {} (delta {}); {}",
                            c.seeds.size(), desk.mean_up / kH, typical_runtime / kH, format_pct(grv),
                            format_pct(fcfs), format_pct(cluster), format_delta(grv - fcfs), walls(e))};
}

Verdict criterion2() {
  const Experiment e = run_shipped("table2_case2");
  const double grv = e.arms.at(PolicyKind::kGrv).mean;
  const double fcfs = e.arms.at(PolicyKind::kFcfs).mean;
  const double cluster = e.arms.at(PolicyKind::kCluster).mean;
  const bool pass = e.total_jobs == 1010 && grv > fcfs && cluster >= 95 && within_budget(e);
  std::cout << e.table;
  return {pass, fmt::format("{} jobs; grv {} fcfs {} cluster {}; {}", e.total_jobs, format_pct(grv),
                            format_pct(fcfs), format_pct(cluster), walls(e))};
}

Verdict criterion3() {
  SimResult s;
  for (std::uint32_t i = 0; i < 6004; ++i) {
    JobRecord j = make_job(i, 0, 1);
    if (i < 5491) {
      j.record_dispatch(ResourceId{0}, 0);
      j.record_completion(1);
    } else {
      j.record_dispatch(ResourceId{0}, 0);
      j.record_interruption(1, Interruption::kEvicted);
    }
    s.jobs.push_back(std::move(j));
  }
  const MetricsReport r = compute_report(s, "grv");
  const std::string shown = format_pct(r.throughput_pct);
  return {shown == "91.5" && r.completed == 5491 && r.total == 6004,
          fmt::format("{} of {} -> {}", r.completed, r.total, shown)};
}

Verdict criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t total = 0, mismatches = 0;
  std::map<PolicyKind, std::size_t> per_policy;
  std::string first;
  auto check = [&](const Instance& in) {
    ++total;
    ++per_policy[in.policy.kind];
    if (!(simulate(in) == interpret(in))) {
      if (mismatches++ == 0) first = in.label;
    }
  };
  for (const auto& in : scripted_instances()) check(in);
  for (PolicyKind kind : {PolicyKind::kGrv, PolicyKind::kFcfs, PolicyKind::kCluster}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) check(random_instance(seed, kind));
  }
  const double wall = seconds_since(t0);
  const bool pass = total >= 200 && mismatches == 0 && wall < 10 && per_policy.size() == 3;
  return {pass, fmt::format("{} instances (grv {}, fcfs {}, cluster {}), {} mismatches{}, {:.2f}s",
                            total, per_policy[PolicyKind::kGrv], per_policy[PolicyKind::kFcfs],
                            per_policy[PolicyKind::kCluster], mismatches,
                            first.empty() ? "" : " first " + first, wall)};
}

Verdict criterion5() {
  const PropertyResult results[] = {
      ra_monotone_and_capped(101, 1000), js_closed_form(102, 1000), argmax_dominance(103, 1000),
      scale_invariance(104, 1000), single_weight_selection(105, 1002)};
  bool pass = true;
  std::string detail;
  for (const auto& r : results) {
    pass = pass && r.ok() && r.cases >= 1000;
    if (!detail.empty()) detail += "; ";
    detail += fmt::format("{} {}/{}", r.name, r.cases - r.failures, r.cases);
    if (!r.ok()) detail += " (" + r.first_failure + ")";
  }
  return {pass, detail};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    out[e.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

Verdict criterion6() {
  // conservation over randomized full-scale runs
  const auto grid = load_catalog(kData / "table1.catalog");
  const auto pool = load_catalog(kData / "cluster.catalog");
  std::mt19937_64 rng(2026);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::size_t runs = 0, boundaries = 0, violations = 0;
  for (int i = 0; i < 21; ++i) {
    PolicyConfig cfg;
    cfg.kind = i % 3 == 0 ? PolicyKind::kGrv : i % 3 == 1 ? PolicyKind::kFcfs : PolicyKind::kCluster;
    if (cfg.kind == PolicyKind::kCluster) {
      cfg.queues = {{"short", uni(1, 48) * kH, 0}, {"long", 120 * kH, 1}};
      cfg.estimate_factor = uni(0.3, 1.5);
    }
    if (cfg.kind == PolicyKind::kGrv) cfg.weights = WeightVector{uni(0, 1), uni(0, 1), uni(0.01, 1)};
    const auto& catalog = cfg.kind == PolicyKind::kCluster ? pool : grid;

    WorkloadSpec spec;
    spec.jobs = 6004;
    spec.arrival = static_cast<ArrivalMode>(i % 3);
    spec.mean_interarrival = uni(0.05, 3) * kH;
    spec.sweep_size = 25;
    spec.work_median = uni(1e13, 1e14);
    spec.work_sigma = uni(0, 1);
    const auto jobs = generate_workload(spec, static_cast<std::uint64_t>(i));

    ChurnModel churn;
    churn.fallback.family = i % 2 ? ChurnFamily::kWeibull : ChurnFamily::kExponential;
    churn.fallback.mean_up = uni(0.5, 8) * kH;
    churn.fallback.mean_down = uni(0.1, 4) * kH;
    churn.fallback.shape = uni(0.5, 2);
    churn.fallback.heterogeneity = uni(0, 2);

    auto policy = make_policy(cfg, catalog);
    EngineOptions options;
    options.horizon = uni(200, 1500) * kH;
    options.sweep_interval = i % 4 == 3 ? uni(60, 3600) : 0;
    SimTime last = 0;
    options.observer = [&](const EngineSnapshot& s) {
      ++boundaries;
      if (s.completed + s.running + s.queued != s.submitted || s.now < last) ++violations;
      last = s.now;
    };
    const SimResult r = run(catalog, jobs, *policy, churn, options, 7000 + static_cast<std::uint64_t>(i));
    std::size_t done = 0, waiting = 0, cut = 0;
    for (const auto& j : r.jobs) {
      switch (final_state(j)) {
        case JobState::kCompleted: ++done; break;
        case JobState::kQueued: ++waiting; break;
        case JobState::kAbandoned: ++cut; break;
      }
    }
    if (done + waiting + cut != r.jobs.size()) ++violations;
    ++runs;
  }

  // byte-identical outputs from identical config and seed
  ExperimentConfig config = load_config(kData / "table2_case1.config");
  config.seeds = {config.seeds.front()};
  const fs::path base = fs::temp_directory_path() / fmt::format("gridrank-accept-{}", ::getpid());
  fs::remove_all(base);
  config.output_dir = base / "a";
  (void)run_experiment(config);
  config.output_dir = base / "b";
  (void)run_experiment(config, 1);
  const auto a = read_tree(base / "a");
  const auto b = read_tree(base / "b");
  fs::remove_all(base);
  const bool identical = !a.empty() && a == b;

  const bool pass = runs >= 20 && violations == 0 && identical;
  return {pass, fmt::format("{} full-scale runs, {} event boundaries, {} violations; repeat run "
                            "{} ({} files)",
                            runs, boundaries, violations, identical ? "byte-identical" : "DIFFERS",
                            a.size())};
}

Verdict criterion7() {
  std::map<std::string, SimResult> out;
  for (const auto& in : scripted_instances()) {
    if (in.label.starts_with("cluster-")) out[in.label] = simulate(in);
  }
  bool priority = false, requeue = false, checkpoint = false;
  if (auto it = out.find("cluster-priority"); it != out.end()) {
    const auto& j = it->second.jobs;
    priority = j[1].history.at(0).time == 0 && j[0].history.at(0).time == 10 * kH;
  }
  if (auto it = out.find("cluster-checkpoint"); it != out.end()) {
    const auto& a = it->second.jobs[0];
    const auto& b = it->second.jobs[1];
    checkpoint = a.history.size() == 4 && a.history[1].kind == JobEvent::Kind::kInterrupted &&
                 a.history[1].reason == Interruption::kCheckpointed && a.history[1].time == 48 * kH &&
                 a.completed() && a.history.back().time == 50 * kH && a.restarts == 1;
    requeue = a.history.size() >= 3 && a.history[2].time == 48 * kH && b.history.at(0).time == 50 * kH;
  }
  return {priority && requeue && checkpoint,
          fmt::format("priority-by-limit {}, head-of-queue requeue {}, checkpoint at limit {}",
                      priority ? "ok" : "FAILED", requeue ? "ok" : "FAILED",
                      checkpoint ? "ok" : "FAILED")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"directional case 1 (grv - fcfs >= 5, cluster above both)", criterion1},
      {"directional case 2 (grv > fcfs, cluster >= 95)", criterion2},
      {"metric exactness (6004/5491 -> 91.5)", criterion3},
      {"oracle equivalence on scripted instances", criterion4},
      {"GRV invariant suite", criterion5},
      {"conservation and determinism", criterion6},
      {"cluster queue model", criterion7},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [title, check] : criteria) {
    ++n;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << fmt::format("criterion {}: {} - {} [{}] ({:.1f}s)\n", n, v.pass ? "PASS" : "FAIL",
                             title, v.detail, seconds_since(t0))
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
