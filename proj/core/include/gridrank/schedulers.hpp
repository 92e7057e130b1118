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
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridrank/domain.hpp"
#include "gridrank/grv.hpp"

namespace gridrank {

struct Dispatch {
  JobId job;
  ResourceId resource;
  SimTime time = 0;
  friend bool operator==(const Dispatch&, const Dispatch&) = default;
};

/// Read-only picture of the grid at a decision point. `available[i]` is
/// nonzero while resource i is inside one of its availability windows.
struct GridView {
  std::span<const ResourceRecord> resources;
  std::span<const JobRecord> jobs;
  std::span<const std::uint8_t> available;

  [[nodiscard]] bool is_free(ResourceId r) const {
    return available[r.value] != 0 && !resources[r.value].occupied_by;
  }
};

/// Resource-vector dispatch pass: queue order, one argmax per job over the
/// unoccupied available matching resources. Candidates have their RA
/// refreshed in `table` before scoring; ties go to the lowest catalog index.
[[nodiscard]] std::vector<Dispatch> grv_select(std::span<const JobId> queued, const GridView& grid,
                                               GrvTable& table, SimTime now);

/// First free matching resource in catalog order, jobs in arrival order.
[[nodiscard]] std::vector<Dispatch> fcfs_select(std::span<const JobId> queued,
                                                const GridView& grid, SimTime now);

struct ClusterQueue {
  std::string name;
  SimTime runtime_limit = 0;  // seconds
  int priority = 0;           // 0 is served first
  friend bool operator==(const ClusterQueue&, const ClusterQueue&) = default;
};

/// Throws std::invalid_argument on empty/duplicate names, non-positive
/// limits, duplicate priorities, or a priority order that is not also
/// ascending in runtime limit.
void validate_queues(std::span<const ClusterQueue> queues);

/// Waiting jobs of one cluster queue, head first.
struct ClusterWaitList {
  ClusterQueue queue;
  std::deque<JobId> jobs;
};

/// Serves queues in priority order; within a queue, head first; each job
/// takes the first free matching node in catalog order.
[[nodiscard]] std::vector<Dispatch> cluster_select(std::span<const ClusterWaitList> lists,
                                                   const GridView& grid, SimTime now);

/// Index into `queues` (already in priority order) of the queue a job with
/// the given runtime estimate is submitted to.
[[nodiscard]] std::size_t choose_queue(std::span<const ClusterQueue> queues,
                                       std::optional<SimTime> estimate);

enum class PolicyKind : std::uint8_t { kGrv, kFcfs, kCluster };

[[nodiscard]] std::string_view to_string(PolicyKind kind);
/// Accepts "grv", "fcfs" (alias "nongrv") and "cluster".
[[nodiscard]] PolicyKind parse_policy_kind(std::string_view text);

/// Interface the engine drives. Notifications update policy state; `select`
/// returns the dispatches to apply now and forgets those jobs.
class SchedulerPolicy {
 public:
  virtual ~SchedulerPolicy() = default;

  [[nodiscard]] virtual PolicyKind kind() const = 0;

  virtual void on_job_arrival(const JobRecord& job, SimTime now) = 0;
  virtual void on_resource_join(ResourceId resource, SimTime now) = 0;
  /// `job` must still be running on `host`; the outcome is reported before
  /// the engine records it. Interrupted jobs go back to the wait queue.
  virtual void on_job_outcome(const JobRecord& job, ResourceId host, Outcome outcome,
                              SimTime now) = 0;

  [[nodiscard]] virtual std::vector<Dispatch> select(const GridView& grid, SimTime now) = 0;

  /// Wall-clock cap per dispatch, if this policy imposes one.
  [[nodiscard]] virtual std::optional<SimTime> runtime_limit(JobId) const { return std::nullopt; }
  [[nodiscard]] virtual const GrvTable* grv_table() const { return nullptr; }
  [[nodiscard]] virtual std::size_t queued() const = 0;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kGrv;
  WeightVector weights;
  GrvParams params;
  std::vector<ClusterQueue> queues;
  /// Cluster only: when a job declares no estimate, estimate it as its true
  /// runtime on the pool times this factor. Unset sends it to the
  /// longest-limit queue.
  std::optional<double> estimate_factor;
};

/// Builds a policy for the given catalog. Throws std::invalid_argument on
/// inconsistent parameters.
[[nodiscard]] std::unique_ptr<SchedulerPolicy> make_policy(const PolicyConfig& config,
                                                           std::span<const ResourceRecord> catalog);

}  // namespace gridrank
