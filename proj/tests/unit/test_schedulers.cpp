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


#include <doctest.h>

#include <vector>

#include "gridrank/schedulers.hpp"
#include "reference.hpp"

using namespace gridrank;
using gridrank::testing::make_job;
using gridrank::testing::make_resource;

namespace {

constexpr double kH = kSecondsPerHour;

struct Grid {
  std::vector<ResourceRecord> resources;
  std::vector<JobRecord> jobs;
  std::vector<std::uint8_t> available;

  explicit Grid(std::size_t n) {
    for (std::uint32_t i = 0; i < n; ++i) {
      resources.push_back(make_resource(i, "A", 1e9, 1, {{0, 1000 * kH}}));
    }
    available.assign(n, 1);
  }
  void add_jobs(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      jobs.push_back(make_job(static_cast<std::uint32_t>(jobs.size()), 0, 1e12));
    }
  }
  GridView view() const { return GridView{resources, jobs, available}; }
};

std::vector<JobId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<JobId> out;
  for (auto x : v) out.push_back(JobId{x});
  return out;
}

GrvParams hourly() {
  GrvParams p;
  p.ra_rate = 1;
  p.ra_max = 100;
  return p;
}

}  // namespace

TEST_CASE("grv_select picks the highest score") {
  Grid g(3);
  g.add_jobs(1);
  GrvTable t(g.resources, hourly(), WeightVector{1, 0, 0});
  const double now = 10 * kH;
  // uptime 1 h, 8 h, 4 h
  t.on_join(ResourceId{0}, now - 1 * kH);
  t.on_join(ResourceId{1}, now - 8 * kH);
  t.on_join(ResourceId{2}, now - 4 * kH);
  const auto d = grv_select(ids({0}), g.view(), t, now);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Dispatch{JobId{0}, ResourceId{1}, now});
  CHECK(t.at(ResourceId{1}).ra == 9);
  CHECK(t.at(ResourceId{2}).ra == 5);
}

TEST_CASE("grv_select with no candidates") {
  Grid g(2);
  g.add_jobs(1);
  g.available = {0, 0};
  GrvTable t(g.resources, GrvParams{}, WeightVector{});
  CHECK(grv_select(ids({0}), g.view(), t, 0).empty());

  g.available = {1, 1};
  g.jobs[0].required_class = ResourceClass{"B"};
  CHECK(grv_select(ids({0}), g.view(), t, 0).empty());
}

TEST_CASE("grv_select takes resources away within a pass") {
  Grid g(2);
  g.add_jobs(2);
  GrvTable t(g.resources, hourly(), WeightVector{1, 0, 0});
  t.on_join(ResourceId{0}, 5 * kH);
  t.on_join(ResourceId{1}, 0);
  const auto d = grv_select(ids({0, 1}), g.view(), t, 6 * kH);
  REQUIRE(d.size() == 2);
  CHECK(d[0].resource == ResourceId{1});
  CHECK(d[1].resource == ResourceId{0});
}

TEST_CASE("grv_select skips occupied and mismatched resources") {
  Grid g(3);
  g.add_jobs(1);
  g.resources[2].resource_class = ResourceClass{"B"};
  g.resources[1].occupied_by = JobId{9};
  GrvTable t(g.resources, hourly(), WeightVector{0, 0, 1});
  g.resources[0].nflops = 1;  // table already holds ca; only matching matters here
  g.jobs[0].required_class = ResourceClass{"A"};
  const auto d = grv_select(ids({0}), g.view(), t, 0);
  REQUIRE(d.size() == 1);
  CHECK(d[0].resource == ResourceId{0});
}

TEST_CASE("fcfs_select") {
  Grid g(4);
  g.add_jobs(2);
  g.available = {0, 1, 0, 1};
  const auto d = fcfs_select(ids({0, 1}), g.view(), 3);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == Dispatch{JobId{0}, ResourceId{1}, 3});
  CHECK(d[1] == Dispatch{JobId{1}, ResourceId{3}, 3});

  g.available = {0, 0, 0, 0};
  CHECK(fcfs_select(ids({0, 1}), g.view(), 3).empty());
}

TEST_CASE("validate_queues") {
  CHECK_NOTHROW(validate_queues(std::vector<ClusterQueue>{{"short", 48 * kH, 0}, {"long", 120 * kH, 1}}));
  CHECK_THROWS(validate_queues(std::vector<ClusterQueue>{}));
  CHECK_THROWS(validate_queues(std::vector<ClusterQueue>{{"a", 1, 0}, {"b", 2, 0}}));
  CHECK_THROWS(validate_queues(std::vector<ClusterQueue>{{"a", 1, 0}, {"a", 2, 1}}));
  CHECK_THROWS(validate_queues(std::vector<ClusterQueue>{{"a", 0, 0}}));
  CHECK_THROWS(validate_queues(std::vector<ClusterQueue>{{"a", 5, 0}, {"b", 2, 1}}));
}

TEST_CASE("choose_queue") {
  const std::vector<ClusterQueue> q{{"short", 48 * kH, 0}, {"long", 120 * kH, 1}};
  CHECK(choose_queue(q, 10 * kH) == 0);
  CHECK(choose_queue(q, 48 * kH) == 0);
  CHECK(choose_queue(q, 49 * kH) == 1);
  CHECK(choose_queue(q, 500 * kH) == 1);
  CHECK(choose_queue(q, std::nullopt) == 1);
}

TEST_CASE("cluster_select serves queues by priority") {
  Grid g(1);
  g.add_jobs(2);
  std::vector<ClusterWaitList> lists{{{"short", 48 * kH, 0}, {JobId{1}}},
                                     {{"long", 120 * kH, 1}, {JobId{0}}}};
  const auto d = cluster_select(lists, g.view(), 0);
  REQUIRE(d.size() == 1);
  CHECK(d[0].job == JobId{1});
}

TEST_CASE("policy kind names") {
  CHECK(parse_policy_kind("grv") == PolicyKind::kGrv);
  CHECK(parse_policy_kind("fcfs") == PolicyKind::kFcfs);
  CHECK(parse_policy_kind("nongrv") == PolicyKind::kFcfs);
  CHECK(parse_policy_kind("cluster") == PolicyKind::kCluster);
  CHECK_THROWS((void)parse_policy_kind("random"));
  CHECK(to_string(PolicyKind::kCluster) == "cluster");
}

TEST_CASE("grv policy outcomes") {
  Grid g(2);
  g.add_jobs(2);
  PolicyConfig cfg;
  auto policy = make_policy(cfg, g.resources);
  policy->on_job_arrival(g.jobs[0], 0);
  policy->on_job_arrival(g.jobs[1], 0);
  CHECK(policy->queued() == 2);
  const auto d = policy->select(g.view(), 0);
  REQUIRE(d.size() == 2);
  CHECK(policy->queued() == 0);
  for (const auto& x : d) {
    g.jobs[x.job.value].record_dispatch(x.resource, 0);
    g.resources[x.resource.value].occupied_by = x.job;
  }

  SUBCASE("completion rewards the host") {
    const ResourceId host = g.jobs[0].history.back().resource;
    policy->on_job_outcome(g.jobs[0], host, Outcome::kCompleted, 5);
    CHECK(policy->grv_table()->at(host).js == 1);
    CHECK(policy->queued() == 0);
  }
  SUBCASE("eviction penalizes the host and requeues") {
    const ResourceId host = g.jobs[1].history.back().resource;
    policy->on_job_outcome(g.jobs[1], host, Outcome::kEvicted, 5);
    CHECK(policy->grv_table()->at(host).js == -1);
    CHECK(policy->queued() == 1);
  }
  SUBCASE("outcome for a job that is not running is rejected") {
    const ResourceId host = g.jobs[0].history.back().resource;
    const ResourceId other{1 - host.value};
    CHECK_THROWS_AS(policy->on_job_outcome(g.jobs[0], other, Outcome::kCompleted, 5),
                    std::logic_error);
    JobRecord idle = make_job(5, 0, 1);
    CHECK_THROWS_AS(policy->on_job_outcome(idle, host, Outcome::kEvicted, 5), std::logic_error);
  }
}

TEST_CASE("cluster policy requeues at the head with no score state") {
  Grid g(1);
  g.add_jobs(3);
  PolicyConfig cfg;
  cfg.kind = PolicyKind::kCluster;
  cfg.queues = {{"short", 48 * kH, 0}, {"long", 120 * kH, 1}};
  for (auto& j : g.jobs) j.runtime_estimate = 10 * kH;
  auto policy = make_policy(cfg, g.resources);
  CHECK(policy->grv_table() == nullptr);
  policy->on_job_arrival(g.jobs[0], 0);
  auto d = policy->select(g.view(), 0);
  REQUIRE(d.size() == 1);
  CHECK(policy->runtime_limit(JobId{0}) == 48 * kH);
  g.jobs[0].record_dispatch(d[0].resource, 0);
  g.resources[0].occupied_by = JobId{0};
  policy->on_job_arrival(g.jobs[1], 1);
  policy->on_job_arrival(g.jobs[2], 2);

  policy->on_job_outcome(g.jobs[0], ResourceId{0}, Outcome::kCheckpointed, 48 * kH);
  g.jobs[0].record_interruption(48 * kH, Interruption::kCheckpointed);
  g.resources[0].occupied_by.reset();
  d = policy->select(g.view(), 48 * kH);
  REQUIRE(d.size() == 1);
  CHECK(d[0].job == JobId{0});
  CHECK(policy->queued() == 2);
}

TEST_CASE("cluster estimate from the pool speed") {
  Grid g(1);
  g.add_jobs(2);
  g.jobs[0].work = 1e9 * 50 * kH;  // 50 h on the pool
  g.jobs[1].work = 1e9 * 5 * kH;
  PolicyConfig cfg;
  cfg.kind = PolicyKind::kCluster;
  cfg.queues = {{"short", 48 * kH, 0}, {"long", 120 * kH, 1}};
  cfg.estimate_factor = 1.0;
  auto policy = make_policy(cfg, g.resources);
  policy->on_job_arrival(g.jobs[0], 0);
  policy->on_job_arrival(g.jobs[1], 0);
  CHECK(policy->runtime_limit(JobId{0}) == 120 * kH);
  CHECK(policy->runtime_limit(JobId{1}) == 48 * kH);

  cfg.estimate_factor.reset();
  policy = make_policy(cfg, g.resources);
  policy->on_job_arrival(g.jobs[1], 0);
  CHECK(policy->runtime_limit(JobId{1}) == 120 * kH);
}
