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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gridrank/metrics.hpp"
#include "gridrank/schedulers.hpp"
#include "gridrank/simulator.hpp"
#include "gridrank/traces.hpp"

namespace gridrank {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where a catalog comes from: a catalog file, or a class spec file plus
/// the seed that draws it.
struct CatalogSource {
  std::filesystem::path path;
  bool synthetic = false;
  std::uint64_t seed = 0;
};

struct ArmConfig {
  std::string label;
  PolicyConfig policy;
  std::optional<CatalogSource> catalog;  // overrides the experiment catalog
};

struct ExperimentConfig {
  std::string name;
  CatalogSource catalog;
  std::variant<std::filesystem::path, WorkloadSpec> workload;
  std::vector<ArmConfig> arms;
  ChurnModel churn;
  SimTime horizon = 0;
  SimTime sweep_interval = 0;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
};

/// INI-style config; relative paths resolve against `base_dir`. Throws
/// ConfigError with the offending section and key.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in,
                                            const std::filesystem::path& base_dir);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError unless there is at least one arm and one seed and a
/// positive horizon.
void validate(const ExperimentConfig& config);

/// [class:LABEL] sections: count, nflops, ncores, dedicated, nflops_jitter, prefix.
[[nodiscard]] CatalogSpec load_catalog_spec(const std::filesystem::path& path);
/// A [workload] section with the generator keys.
[[nodiscard]] WorkloadSpec load_workload_spec(const std::filesystem::path& path);

[[nodiscard]] std::vector<ResourceRecord> materialize(const CatalogSource& source);

struct ArmRun {
  std::string label;
  std::uint64_t seed = 0;
  SimResult result;
  MetricsReport report;
  double wall_seconds = 0;
};

/// Every (arm, seed) pair, arm-major in config order. Arms run in parallel
/// up to `threads` (0 means hardware concurrency).
[[nodiscard]] std::vector<ArmRun> run_arms(const ExperimentConfig& config, unsigned threads = 0);

[[nodiscard]] ComparisonTable aggregate(std::span<const ArmRun> runs);

/// File stem of one (arm, seed) output; sorts in config order.
[[nodiscard]] std::string output_stem(std::size_t arm_index, const std::string& label,
                                      std::size_t seed_index);

/// Runs the experiment and writes, under config.output_dir, one .result
/// and one .report.csv per (arm, seed) plus aggregate.csv. On failure the
/// files written so far are removed and the exception propagates.
ComparisonTable run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// Recomputes reports and the aggregate from a directory of .result files.
/// Writes them into `out_dir` when given. Throws ConfigError("no results
/// found") on a directory without results.
ComparisonTable report_directory(const std::filesystem::path& results,
                                 const std::optional<std::filesystem::path>& out_dir);

}  // namespace gridrank
