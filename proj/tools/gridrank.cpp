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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gridrank/experiment.hpp"
#include "gridrank/traces.hpp"

namespace fs = std::filesystem;
using namespace gridrank;

namespace {

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Random seed (replaces the config's seed list)");
  cmd->add_option("--out-dir", common.out_dir, "Output directory");
  cmd->add_flag("--quiet", common.quiet, "Suppress the summary table");
}

fs::path place(const std::string& out, const CommonOptions& common) {
  fs::path p(out);
  if (common.out_dir && p.is_relative()) {
    fs::create_directories(*common.out_dir);
    p = fs::path(*common.out_dir) / p;
  }
  return p;
}

int cmd_simulate(const std::string& config_path, unsigned threads, const CommonOptions& common) {
  ExperimentConfig config = load_config(config_path);
  if (common.seed) config.seeds = {*common.seed};
  if (common.out_dir) config.output_dir = *common.out_dir;
  if (config.output_dir.empty()) config.output_dir = fs::path("results") / config.name;
  const ComparisonTable table = run_experiment(config, threads);
  if (!common.quiet) {
    fmt::print("{} ({} seed{}) -> {}\n{}", config.name, config.seeds.size(),
               config.seeds.size() == 1 ? "" : "s", config.output_dir.string(), render(table));
  }
  return 0;
}

int cmd_gen_catalog(const std::string& spec_path, const std::string& out,
                    const CommonOptions& common) {
  const CatalogSpec spec = load_catalog_spec(spec_path);
  const auto catalog = generate_catalog(spec, common.seed.value_or(0));
  const fs::path target = place(out, common);
  save_catalog(target, catalog);
  if (!common.quiet) fmt::print("wrote {} resources to {}\n", catalog.size(), target.string());
  return 0;
}

int cmd_gen_workload(const std::string& spec_path, const std::string& out,
                     const CommonOptions& common) {
  const WorkloadSpec spec = load_workload_spec(spec_path);
  const auto jobs = generate_workload(spec, common.seed.value_or(0));
  const fs::path target = place(out, common);
  save_workload(target, jobs);
  if (!common.quiet) fmt::print("wrote {} jobs to {}\n", jobs.size(), target.string());
  return 0;
}

int cmd_report(const std::string& results, const CommonOptions& common) {
  std::optional<fs::path> out;
  if (common.out_dir) out = *common.out_dir;
  const ComparisonTable table = report_directory(results, out);
  if (!common.quiet) fmt::print("{}", render(table));
  return 0;
}

int cmd_validate(const std::string& catalog_path, const std::optional<std::string>& workload_path,
                 const CommonOptions& common) {
  const auto catalog = load_catalog(catalog_path);
  const auto classes = classes_of(catalog);
  if (!common.quiet) {
    fmt::print("{}: {} resources\n", catalog_path, catalog.size());
    for (const auto& c : classes) {
      const auto n = std::ranges::count(catalog, c, &ResourceRecord::resource_class);
      fmt::print("  {:<16} {}\n", c.label, n);
    }
  }
  if (workload_path) {
    const auto jobs = load_workload(*workload_path, std::span<const ResourceClass>(classes));
    if (!common.quiet) fmt::print("{}: {} jobs\n", *workload_path, jobs.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven campus grid simulator with resource-vector dispatch"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string config_path, spec_path, out_path, results_dir, catalog_path;
  std::optional<std::string> workload_path;
  unsigned threads = 0;

  auto* simulate = app.add_subcommand("simulate", "Run an experiment config");
  simulate->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--threads", threads, "Parallel arms (0 = all cores)");
  add_common(simulate, common);

  auto* gen_catalog = app.add_subcommand("gen-catalog", "Generate a catalog from a class spec");
  gen_catalog->add_option("--spec", spec_path, "Catalog spec file")->required()->check(CLI::ExistingFile);
  gen_catalog->add_option("--out", out_path, "Catalog file to write")->required();
  add_common(gen_catalog, common);

  auto* gen_workload = app.add_subcommand("gen-workload", "Generate a synthetic workload");
  gen_workload->add_option("--spec", spec_path, "Workload spec file")->required()->check(CLI::ExistingFile);
  gen_workload->add_option("--out", out_path, "Workload file to write")->required();
  add_common(gen_workload, common);

  auto* report = app.add_subcommand("report", "Recompute reports from stored results");
  report->add_option("--results", results_dir, "Directory of .result files")->required();
  add_common(report, common);

  auto* validate = app.add_subcommand("validate", "Check catalog and workload files");
  validate->add_option("--catalog", catalog_path, "Catalog file")->required();
  validate->add_option("--workload", workload_path, "Workload file");
  add_common(validate, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, threads, common);
    if (gen_catalog->parsed()) return cmd_gen_catalog(spec_path, out_path, common);
    if (gen_workload->parsed()) return cmd_gen_workload(spec_path, out_path, common);
    if (report->parsed()) return cmd_report(results_dir, common);
    if (validate->parsed()) return cmd_validate(catalog_path, workload_path, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
