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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridrank/schedulers.hpp"
#include "gridrank/simulator.hpp"

namespace gridrank {

/// Per-run totals of one policy arm.
/// `completed` counts jobs that finished on their first dispatch;
/// `restarted` counts jobs interrupted at least once, whatever their final
/// state; `evictions` counts interruption events.
struct MetricsReport {
  std::string label;
  PolicyKind policy = PolicyKind::kGrv;
  std::size_t total = 0;
  std::size_t completed = 0;
  std::size_t restarted = 0;
  std::size_t abandoned = 0;
  std::size_t queued = 0;
  std::size_t evictions = 0;
  double throughput_pct = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

[[nodiscard]] MetricsReport compute_report(const SimResult& result, std::string label);

/// One decimal place, halves rounded up ("91.5").
[[nodiscard]] std::string format_pct(double pct);
[[nodiscard]] std::string format_delta(double delta);

inline constexpr std::string_view kReportColumns = "policy,total,completed,restarted,abandoned,throughput_pct";

void write_report(std::ostream& out, const MetricsReport& report);

/// Seed-averaged view of one arm.
struct ArmSummary {
  std::string label;
  PolicyKind policy = PolicyKind::kGrv;
  std::size_t seeds = 0;
  double total = 0;
  double completed = 0;
  double restarted = 0;
  double abandoned = 0;
  double evictions = 0;
  double throughput_mean = 0;
  double throughput_stddev = 0;  // sample standard deviation; 0 for one seed
};

/// Throws std::invalid_argument on an empty list or mixed labels.
[[nodiscard]] ArmSummary summarize(std::span<const MetricsReport> per_seed);

struct ComparisonTable {
  std::vector<ArmSummary> rows;
  /// GRV minus FCFS mean throughput, present when both kinds are compared.
  std::optional<double> delta;
};

/// Throws std::invalid_argument when the rows disagree on total jobs.
[[nodiscard]] ComparisonTable compare(std::span<const ArmSummary> rows);
[[nodiscard]] ComparisonTable compare(std::span<const MetricsReport> reports);

/// Aligned human-readable table.
[[nodiscard]] std::string render(const ComparisonTable& table);
/// Aggregate file: one CSV row per arm, delta as a trailing comment line.
void write_aggregate(std::ostream& out, const ComparisonTable& table);

// SimResult persistence, so reports can be recomputed without rerunning.
void write_result(std::ostream& out, const SimResult& result, const std::string& label,
                  std::uint64_t seed);
struct StoredResult {
  std::string label;
  std::uint64_t seed = 0;
  SimResult result;
};
[[nodiscard]] StoredResult read_result(std::istream& in, const std::string& source = "<stream>");

}  // namespace gridrank
