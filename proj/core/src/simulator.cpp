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

#include "gridrank/simulator.hpp"

#include <queue>

#include <fmt/format.h>

namespace gridrank {

JobState final_state(const JobRecord& job) {
  if (job.completed()) return JobState::kCompleted;
  if (job.running()) return JobState::kAbandoned;
  return JobState::kQueued;
}

namespace {

Outcome to_outcome(Interruption reason) {
  switch (reason) {
    case Interruption::kEvicted: return Outcome::kEvicted;
    case Interruption::kRequeued: return Outcome::kRequeued;
    case Interruption::kCheckpointed: return Outcome::kCheckpointed;
  }
  return Outcome::kEvicted;
}

struct Later {
  bool operator()(const SimEvent& a, const SimEvent& b) const { return b < a; }
};

class Engine {
 public:
  Engine(std::span<const ResourceRecord> catalog, std::span<const JobRecord> workload,
         SchedulerPolicy& policy, const EngineOptions& options)
      : policy_(policy), options_(options) {
    if (!(options.horizon > 0)) throw std::invalid_argument("horizon must be > 0");
    if (options.sweep_interval < 0) throw std::invalid_argument("sweep interval must be >= 0");
    if (auto v = validate_catalog(catalog); !v.empty()) {
      throw std::invalid_argument(
          fmt::format("invalid catalog: resource {} field {}: {}", v[0].resource, v[0].field,
                      v[0].message));
    }
    resources_.assign(catalog.begin(), catalog.end());
    for (auto& r : resources_) r.occupied_by.reset();
    available_.assign(resources_.size(), 0);

    jobs_.reserve(workload.size());
    for (std::uint32_t i = 0; i < workload.size(); ++i) {
      JobRecord job = workload[i];
      if (job.id.value != i) throw std::invalid_argument(fmt::format("job {} is out of place", job.name));
      if (!(job.work > 0) || job.submit_time < 0) {
        throw std::invalid_argument(fmt::format("job {} has invalid work or submit time", job.name));
      }
      job.history.clear();
      job.restarts = 0;
      jobs_.push_back(std::move(job));
    }
    remaining_.resize(jobs_.size());
    for (std::size_t i = 0; i < jobs_.size(); ++i) remaining_[i] = jobs_[i].work;
    epoch_.assign(jobs_.size(), 0);
    limit_.assign(jobs_.size(), 0);

    for (const auto& job : jobs_) push(job.submit_time, EventKind::kJobSubmit, job.id, {});
    for (const auto& r : resources_) {
      for (const auto& iv : r.availability.intervals()) {
        push(iv.start, EventKind::kResourceJoin, {}, r.id);
        push(iv.end, EventKind::kResourceLeave, {}, r.id);
      }
    }
    if (options_.sweep_interval > 0) push(0, EventKind::kSchedulerSweep, {}, {});
  }

  SimResult run() {
    SimTime last = 0;
    while (!queue_.empty()) {
      SimEvent ev = queue_.top();
      if (ev.time >= options_.horizon) break;
      queue_.pop();
      if (is_stale(ev)) continue;
      if (ev.time < last) throw std::logic_error("event processed out of order");
      now_ = last = ev.time;
      ++processed_;
      handle(ev);
      if (options_.sweep_interval == 0 || ev.kind == EventKind::kSchedulerSweep) schedule();
      if (options_.observer) options_.observer(snapshot(ev.kind));
    }

    SimResult result;
    result.policy = policy_.kind();
    for (const auto& r : resources_) result.resource_names.push_back(r.name);
    result.jobs = std::move(jobs_);
    if (const GrvTable* t = policy_.grv_table()) {
      result.grv.assign(t->entries().begin(), t->entries().end());
    }
    result.events = processed_;
    result.elapsed = last;
    result.horizon = options_.horizon;
    return result;
  }

 private:
  void push(SimTime t, EventKind kind, JobId job, ResourceId resource, std::uint64_t epoch = 0) {
    if (t < now_) throw std::logic_error(fmt::format("event scheduled in the past: {} < {}", t, now_));
    queue_.push(SimEvent{t, next_seq_++, kind, job, resource, epoch});
  }

  bool is_stale(const SimEvent& ev) const {
    return (ev.kind == EventKind::kJobComplete || ev.kind == EventKind::kQueueLimitHit) &&
           ev.epoch != epoch_[ev.job.value];
  }

  void handle(const SimEvent& ev) {
    switch (ev.kind) {
      case EventKind::kJobSubmit:
        ++submitted_;
        policy_.on_job_arrival(jobs_[ev.job.value], now_);
        break;
      case EventKind::kResourceJoin:
        available_[ev.resource.value] = 1;
        policy_.on_resource_join(ev.resource, now_);
        break;
      case EventKind::kResourceLeave: {
        available_[ev.resource.value] = 0;
        if (auto j = resources_[ev.resource.value].occupied_by) {
          interrupt(*j, ev.resource, Interruption::kEvicted);
        }
        break;
      }
      case EventKind::kJobComplete: {
        JobRecord& job = jobs_[ev.job.value];
        policy_.on_job_outcome(job, ev.resource, Outcome::kCompleted, now_);
        job.record_completion(now_);
        release(ev.job, ev.resource);
        ++completed_;
        break;
      }
      case EventKind::kQueueLimitHit:
        interrupt(ev.job, ev.resource, Interruption::kCheckpointed);
        break;
      case EventKind::kSchedulerSweep:
        push(now_ + options_.sweep_interval, EventKind::kSchedulerSweep, {}, {});
        break;
    }
  }

  void interrupt(JobId j, ResourceId host, Interruption reason) {
    JobRecord& job = jobs_[j.value];
    policy_.on_job_outcome(job, host, to_outcome(reason), now_);
    job.record_interruption(now_, reason);
    if (reason == Interruption::kCheckpointed) {
      remaining_[j.value] -= limit_[j.value] * resources_[host.value].speed();
    } else {
      remaining_[j.value] = job.work;
    }
    release(j, host);
  }

  void release(JobId j, ResourceId host) {
    auto& r = resources_[host.value];
    if (r.occupied_by != j) throw std::logic_error("occupancy mismatch on release");
    r.occupied_by.reset();
    ++epoch_[j.value];
    --running_;
  }

  void schedule() {
    if (policy_.queued() == 0) return;
    const GridView grid{resources_, jobs_, available_};
    for (const Dispatch& d : policy_.select(grid, now_)) apply(d);
  }

  void apply(const Dispatch& d) {
    auto& r = resources_.at(d.resource.value);
    JobRecord& job = jobs_.at(d.job.value);
    if (!available_[d.resource.value] || r.occupied_by || !job.matches(r) || d.time != now_) {
      throw std::logic_error(fmt::format("policy produced an illegal dispatch of job {} to {}",
                                         job.name, r.name));
    }
    job.record_dispatch(d.resource, now_);
    r.occupied_by = d.job;
    ++running_;
    const double runtime = remaining_[d.job.value] / r.speed();
    const auto cap = policy_.runtime_limit(d.job);
    const std::uint64_t epoch = epoch_[d.job.value];
    if (cap && runtime > *cap) {
      limit_[d.job.value] = *cap;
      push(now_ + *cap, EventKind::kQueueLimitHit, d.job, d.resource, epoch);
    } else {
      push(now_ + runtime, EventKind::kJobComplete, d.job, d.resource, epoch);
    }
  }

  EngineSnapshot snapshot(EventKind last) const {
    return EngineSnapshot{now_, last, submitted_, completed_, running_, policy_.queued()};
  }

  SchedulerPolicy& policy_;
  const EngineOptions& options_;
  std::vector<ResourceRecord> resources_;
  std::vector<std::uint8_t> available_;
  std::vector<JobRecord> jobs_;
  std::vector<double> remaining_;
  std::vector<std::uint64_t> epoch_;
  std::vector<SimTime> limit_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  SimTime now_ = 0;
  std::size_t submitted_ = 0;
  std::size_t completed_ = 0;
  std::size_t running_ = 0;
};

}  // namespace

SimResult run(std::span<const ResourceRecord> catalog, std::span<const JobRecord> workload,
              SchedulerPolicy& policy, const EngineOptions& options) {
  return Engine(catalog, workload, policy, options).run();
}

SimResult run(std::span<const ResourceRecord> catalog, std::span<const JobRecord> workload,
              SchedulerPolicy& policy, const ChurnModel& churn, const EngineOptions& options,
              std::uint64_t seed) {
  std::vector<ResourceRecord> resources(catalog.begin(), catalog.end());
  auto schedules = generate_churn(resources, churn, options.horizon, seed);
  for (std::size_t i = 0; i < resources.size(); ++i) resources[i].availability = std::move(schedules[i]);
  return run(resources, workload, policy, options);
}

}  // namespace gridrank
