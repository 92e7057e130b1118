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

#include "gridrank/schedulers.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace gridrank {

namespace {

std::vector<ResourceId> free_resources(const GridView& grid) {
  std::vector<ResourceId> out;
  for (std::uint32_t i = 0; i < grid.resources.size(); ++i) {
    if (grid.is_free(ResourceId{i})) out.push_back(ResourceId{i});
  }
  return out;
}

// First-match pass shared by FCFS and the cluster queues.
template <typename JobRange>
void first_match(const JobRange& jobs, const GridView& grid, SimTime now,
                 std::vector<ResourceId>& free, std::vector<Dispatch>& out) {
  for (JobId j : jobs) {
    if (free.empty()) return;
    const JobRecord& job = grid.jobs[j.value];
    auto it = std::find_if(free.begin(), free.end(), [&](ResourceId r) {
      return job.matches(grid.resources[r.value]);
    });
    if (it == free.end()) continue;
    out.push_back({j, *it, now});
    free.erase(it);
  }
}

template <typename Container>
void drop_dispatched(Container& queue, std::span<const Dispatch> dispatched) {
  if (dispatched.empty()) return;
  std::set<JobId> gone;
  for (const auto& d : dispatched) gone.insert(d.job);
  std::erase_if(queue, [&](JobId j) { return gone.contains(j); });
}

}  // namespace

std::vector<Dispatch> grv_select(std::span<const JobId> queued, const GridView& grid,
                                 GrvTable& table, SimTime now) {
  std::vector<Dispatch> out;
  std::vector<ResourceId> free = free_resources(grid);
  std::vector<ResourceId> candidates;
  std::vector<GrvState> states;
  for (JobId j : queued) {
    if (free.empty()) break;
    const JobRecord& job = grid.jobs[j.value];
    candidates.clear();
    for (ResourceId r : free) {
      if (job.matches(grid.resources[r.value])) candidates.push_back(r);
    }
    if (candidates.empty()) continue;

    states.clear();
    for (ResourceId r : candidates) {
      table.refresh(r, now);
      states.push_back(table.at(r));
    }
    const NormalizationContext norm = normalize_context(states);
    std::size_t best = 0;
    double best_score = score(states[0], table.weights(), norm);
    for (std::size_t k = 1; k < states.size(); ++k) {
      const double s = score(states[k], table.weights(), norm);
      if (s > best_score) {
        best = k;
        best_score = s;
      }
    }
    out.push_back({j, candidates[best], now});
    std::erase(free, candidates[best]);
  }
  return out;
}

std::vector<Dispatch> fcfs_select(std::span<const JobId> queued, const GridView& grid,
                                  SimTime now) {
  std::vector<Dispatch> out;
  std::vector<ResourceId> free = free_resources(grid);
  first_match(queued, grid, now, free, out);
  return out;
}

void validate_queues(std::span<const ClusterQueue> queues) {
  if (queues.empty()) throw std::invalid_argument("cluster policy needs at least one queue");
  std::set<std::string> names;
  std::set<int> priorities;
  for (const auto& q : queues) {
    if (q.name.empty()) throw std::invalid_argument("cluster queue with empty name");
    if (!names.insert(q.name).second) {
      throw std::invalid_argument(fmt::format("duplicate cluster queue '{}'", q.name));
    }
    if (!(q.runtime_limit > 0)) {
      throw std::invalid_argument(fmt::format("queue '{}': runtime_limit must be > 0", q.name));
    }
    if (!priorities.insert(q.priority).second) {
      throw std::invalid_argument(fmt::format("queue '{}': duplicate priority {}", q.name, q.priority));
    }
  }
  std::vector<ClusterQueue> sorted(queues.begin(), queues.end());
  std::ranges::sort(sorted, {}, &ClusterQueue::priority);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].runtime_limit < sorted[i - 1].runtime_limit) {
      throw std::invalid_argument(fmt::format(
          "queue '{}' outranks '{}' but has the longer runtime limit", sorted[i - 1].name,
          sorted[i].name));
    }
  }
}

std::vector<Dispatch> cluster_select(std::span<const ClusterWaitList> lists, const GridView& grid,
                                     SimTime now) {
  std::vector<Dispatch> out;
  std::vector<ResourceId> free = free_resources(grid);
  for (const auto& list : lists) first_match(list.jobs, grid, now, free, out);
  return out;
}

std::size_t choose_queue(std::span<const ClusterQueue> queues, std::optional<SimTime> estimate) {
  std::size_t longest = 0;
  for (std::size_t i = 1; i < queues.size(); ++i) {
    if (queues[i].runtime_limit > queues[longest].runtime_limit) longest = i;
  }
  if (!estimate) return longest;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < queues.size(); ++i) {
    if (queues[i].runtime_limit >= *estimate &&
        (!best || queues[i].runtime_limit < queues[*best].runtime_limit)) {
      best = i;
    }
  }
  return best.value_or(longest);
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kGrv: return "grv";
    case PolicyKind::kFcfs: return "fcfs";
    case PolicyKind::kCluster: return "cluster";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view text) {
  if (text == "grv") return PolicyKind::kGrv;
  if (text == "fcfs" || text == "nongrv") return PolicyKind::kFcfs;
  if (text == "cluster") return PolicyKind::kCluster;
  throw std::invalid_argument(fmt::format("unknown policy '{}'", text));
}

namespace {

void require_running(const JobRecord& job, ResourceId host) {
  if (!job.running() || job.history.back().resource != host) {
    throw std::logic_error(
        fmt::format("outcome reported for job {} which is not running on resource {}", job.name,
                    host.value));
  }
}

class GrvPolicy final : public SchedulerPolicy {
 public:
  GrvPolicy(std::span<const ResourceRecord> catalog, const PolicyConfig& config)
      : table_(catalog, config.params, config.weights) {}

  PolicyKind kind() const override { return PolicyKind::kGrv; }

  void on_job_arrival(const JobRecord& job, SimTime) override { queue_.push_back(job.id); }
  void on_resource_join(ResourceId r, SimTime now) override { table_.on_join(r, now); }

  void on_job_outcome(const JobRecord& job, ResourceId host, Outcome outcome, SimTime) override {
    require_running(job, host);
    table_.record(host, outcome);
    if (is_failure(outcome)) queue_.push_back(job.id);
  }

  std::vector<Dispatch> select(const GridView& grid, SimTime now) override {
    auto out = grv_select(queue_, grid, table_, now);
    drop_dispatched(queue_, out);
    return out;
  }

  const GrvTable* grv_table() const override { return &table_; }
  std::size_t queued() const override { return queue_.size(); }

 private:
  GrvTable table_;
  std::vector<JobId> queue_;
};

class FcfsPolicy final : public SchedulerPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::kFcfs; }

  void on_job_arrival(const JobRecord& job, SimTime) override { queue_.push_back(job.id); }
  void on_resource_join(ResourceId, SimTime) override {}

  void on_job_outcome(const JobRecord& job, ResourceId host, Outcome outcome, SimTime) override {
    require_running(job, host);
    if (is_failure(outcome)) queue_.push_back(job.id);
  }

  std::vector<Dispatch> select(const GridView& grid, SimTime now) override {
    auto out = fcfs_select(queue_, grid, now);
    drop_dispatched(queue_, out);
    return out;
  }

  std::size_t queued() const override { return queue_.size(); }

 private:
  std::vector<JobId> queue_;
};

class ClusterPolicy final : public SchedulerPolicy {
 public:
  ClusterPolicy(std::span<const ResourceRecord> catalog, const PolicyConfig& config)
      : estimate_factor_(config.estimate_factor) {
    validate_queues(config.queues);
    std::vector<ClusterQueue> sorted = config.queues;
    std::ranges::sort(sorted, {}, &ClusterQueue::priority);
    for (auto& q : sorted) lists_.push_back({std::move(q), {}});
    if (estimate_factor_) {
      if (!(*estimate_factor_ > 0)) throw std::invalid_argument("estimate_factor must be > 0");
      if (catalog.empty()) throw std::invalid_argument("cluster estimate needs a non-empty pool");
      reference_speed_ = catalog.front().speed();
    }
  }

  PolicyKind kind() const override { return PolicyKind::kCluster; }

  void on_job_arrival(const JobRecord& job, SimTime) override {
    std::optional<SimTime> estimate = job.runtime_estimate;
    if (!estimate && estimate_factor_) estimate = job.work / reference_speed_ * *estimate_factor_;
    std::vector<ClusterQueue> queues;
    for (const auto& l : lists_) queues.push_back(l.queue);
    const std::size_t q = choose_queue(queues, estimate);
    if (assigned_.size() <= job.id.value) assigned_.resize(job.id.value + 1, 0);
    assigned_[job.id.value] = q;
    lists_[q].jobs.push_back(job.id);
  }

  void on_resource_join(ResourceId, SimTime) override {}

  void on_job_outcome(const JobRecord& job, ResourceId host, Outcome outcome, SimTime) override {
    require_running(job, host);
    if (is_failure(outcome)) lists_[assigned_.at(job.id.value)].jobs.push_front(job.id);
  }

  std::vector<Dispatch> select(const GridView& grid, SimTime now) override {
    auto out = cluster_select(lists_, grid, now);
    for (auto& l : lists_) drop_dispatched(l.jobs, out);
    return out;
  }

  std::optional<SimTime> runtime_limit(JobId j) const override {
    return lists_[assigned_.at(j.value)].queue.runtime_limit;
  }

  std::size_t queued() const override {
    std::size_t n = 0;
    for (const auto& l : lists_) n += l.jobs.size();
    return n;
  }

 private:
  std::vector<ClusterWaitList> lists_;
  std::vector<std::size_t> assigned_;
  std::optional<double> estimate_factor_;
  double reference_speed_ = 0;
};

}  // namespace

std::unique_ptr<SchedulerPolicy> make_policy(const PolicyConfig& config,
                                             std::span<const ResourceRecord> catalog) {
  switch (config.kind) {
    case PolicyKind::kGrv: return std::make_unique<GrvPolicy>(catalog, config);
    case PolicyKind::kFcfs: return std::make_unique<FcfsPolicy>();
    case PolicyKind::kCluster: return std::make_unique<ClusterPolicy>(catalog, config);
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace gridrank
