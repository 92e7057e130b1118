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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridrank/domain.hpp"
#include "gridrank/schedulers.hpp"

namespace gridrank {

enum class EventKind : std::uint8_t {
  kJobSubmit,
  kJobComplete,
  kResourceJoin,
  kResourceLeave,
  kQueueLimitHit,
  kSchedulerSweep,
};

/// Processing rank among events sharing a timestamp: a resource vanishing
/// wins over a job finishing on it, and arrivals are seen before joins.
[[nodiscard]] constexpr int tie_rank(EventKind kind) {
  switch (kind) {
    case EventKind::kResourceLeave: return 0;
    case EventKind::kJobComplete:
    case EventKind::kQueueLimitHit: return 1;
    case EventKind::kJobSubmit: return 2;
    case EventKind::kResourceJoin: return 3;
    case EventKind::kSchedulerSweep: return 4;
  }
  return 5;
}

struct SimEvent {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kJobSubmit;
  JobId job;
  ResourceId resource;
  std::uint64_t epoch = 0;  // job dispatch generation; stale completions are dropped

  /// Strict weak order of processing: (time, tie_rank, seq).
  friend bool operator<(const SimEvent& a, const SimEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (tie_rank(a.kind) != tie_rank(b.kind)) return tie_rank(a.kind) < tie_rank(b.kind);
    return a.seq < b.seq;
  }
};

// ---------------------------------------------------------------------------
// Availability churn

enum class ChurnFamily : std::uint8_t { kAlways, kExponential, kWeibull };

/// Up/down duration model for one resource class. Durations are in seconds.
struct ChurnClassModel {
  ChurnFamily family = ChurnFamily::kAlways;
  double mean_up = 0;
  double mean_down = 0;
  double shape = 1.0;  // Weibull shape of up periods; down periods are exponential
  /// Log-normal sigma of a per-resource multiplier on mean_up (mean 1). Zero
  /// makes every resource of the class statistically identical.
  double heterogeneity = 0;
  /// Start each resource in its stationary up/down phase rather than up.
  bool random_phase = true;
};

struct ChurnModel {
  ChurnClassModel fallback;
  std::map<std::string, ChurnClassModel, std::less<>> per_class;

  [[nodiscard]] const ChurnClassModel& for_class(const ResourceClass& c) const;
};

/// Throws std::invalid_argument on negative means or a non-positive shape.
void validate(const ChurnModel& model);

/// One schedule per resource, in catalog order, truncated at `horizon`.
/// Dedicated resources and degenerate models (zero mean down time) get a
/// single [0, horizon) window. Deterministic in `seed`.
[[nodiscard]] std::vector<AvailabilitySchedule> generate_churn(
    std::span<const ResourceRecord> catalog, const ChurnModel& model, SimTime horizon,
    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Engine

enum class JobState : std::uint8_t { kCompleted, kQueued, kAbandoned };

/// Completed, still waiting, or running when the horizon cut it off.
[[nodiscard]] JobState final_state(const JobRecord& job);

struct SimResult {
  PolicyKind policy = PolicyKind::kGrv;
  std::vector<std::string> resource_names;
  std::vector<JobRecord> jobs;
  std::vector<GrvState> grv;  // empty unless the policy keeps a vector
  std::uint64_t events = 0;
  SimTime elapsed = 0;  // time of the last processed event
  SimTime horizon = 0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Counts at an event boundary, reported to EngineOptions::observer.
struct EngineSnapshot {
  SimTime now = 0;
  EventKind last = EventKind::kJobSubmit;
  std::size_t submitted = 0;
  std::size_t completed = 0;
  std::size_t running = 0;
  std::size_t queued = 0;
};

struct EngineOptions {
  SimTime horizon = 0;
  /// Zero runs the policy after every event; otherwise only at multiples of
  /// this interval.
  SimTime sweep_interval = 0;
  std::function<void(const EngineSnapshot&)> observer;
};

/// Runs `workload` on `catalog`, whose availability schedules are taken as
/// given. Events at or beyond the horizon are not processed. Throws
/// std::invalid_argument on an invalid catalog or workload.
[[nodiscard]] SimResult run(std::span<const ResourceRecord> catalog,
                            std::span<const JobRecord> workload, SchedulerPolicy& policy,
                            const EngineOptions& options);

/// Draws availability from `churn` under `seed`, then runs.
[[nodiscard]] SimResult run(std::span<const ResourceRecord> catalog,
                            std::span<const JobRecord> workload, SchedulerPolicy& policy,
                            const ChurnModel& churn, const EngineOptions& options,
                            std::uint64_t seed);

}  // namespace gridrank
