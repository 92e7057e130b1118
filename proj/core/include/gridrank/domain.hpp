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

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridrank {

/// Simulated time in seconds since the start of a run.
using SimTime = double;

inline constexpr double kSecondsPerHour = 3600.0;

/// Dense index of a resource within its catalog. Catalog order is the
/// canonical order used by first-match dispatch and by score tiebreaks.
struct ResourceId {
  std::uint32_t value = 0;
  friend auto operator<=>(const ResourceId&, const ResourceId&) = default;
};

/// Dense index of a job within its (submit-time sorted) workload.
struct JobId {
  std::uint32_t value = 0;
  friend auto operator<=>(const JobId&, const JobId&) = default;
};

struct ResourceClass {
  std::string label;
  friend auto operator<=>(const ResourceClass&, const ResourceClass&) = default;
};

/// Half-open availability window [start, end).
struct Interval {
  SimTime start = 0;
  SimTime end = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, disjoint windows during which a resource may run grid jobs.
class AvailabilitySchedule {
 public:
  AvailabilitySchedule() = default;
  /// Throws std::invalid_argument unless the windows are non-empty, sorted
  /// and disjoint.
  explicit AvailabilitySchedule(std::vector<Interval> intervals);

  static AvailabilitySchedule always(SimTime horizon);

  [[nodiscard]] std::span<const Interval> intervals() const { return intervals_; }
  [[nodiscard]] bool available_at(SimTime t) const;
  [[nodiscard]] bool empty() const { return intervals_.empty(); }

  friend bool operator==(const AvailabilitySchedule&, const AvailabilitySchedule&) = default;

 private:
  std::vector<Interval> intervals_;
};

struct ResourceRecord {
  ResourceId id;
  std::string name;
  ResourceClass resource_class;
  double nflops = 0;  // per core, flop/s
  int ncores = 0;
  bool dedicated = false;
  AvailabilitySchedule availability;
  std::optional<JobId> occupied_by;

  [[nodiscard]] double speed() const { return nflops * ncores; }

  friend bool operator==(const ResourceRecord&, const ResourceRecord&) = default;
};

/// Why a running job stopped short of completion. All three carry the same
/// job-success penalty by default.
enum class Interruption : std::uint8_t { kEvicted, kRequeued, kCheckpointed };

enum class Outcome : std::uint8_t { kCompleted, kEvicted, kRequeued, kCheckpointed };

[[nodiscard]] constexpr bool is_failure(Outcome o) { return o != Outcome::kCompleted; }

struct JobEvent {
  enum class Kind : std::uint8_t { kDispatched, kInterrupted, kCompleted };
  Kind kind = Kind::kDispatched;
  SimTime time = 0;
  ResourceId resource;  // meaningful for every kind; the hosting resource
  Interruption reason = Interruption::kEvicted;

  friend bool operator==(const JobEvent&, const JobEvent&) = default;
};

struct JobRecord {
  JobId id;
  std::string name;
  SimTime submit_time = 0;
  double work = 0;  // flop
  std::optional<ResourceClass> required_class;
  std::optional<double> runtime_estimate;  // seconds, as declared by the submitter
  std::vector<JobEvent> history;
  int restarts = 0;

  [[nodiscard]] bool completed() const {
    return !history.empty() && history.back().kind == JobEvent::Kind::kCompleted;
  }
  [[nodiscard]] bool running() const {
    return !history.empty() && history.back().kind == JobEvent::Kind::kDispatched;
  }
  [[nodiscard]] bool matches(const ResourceRecord& r) const {
    return !required_class || *required_class == r.resource_class;
  }

  void record_dispatch(ResourceId r, SimTime t);
  void record_interruption(SimTime t, Interruption reason);
  void record_completion(SimTime t);

  friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

struct GrvState {
  double ra = 0;
  double js = 0;
  double ca = 0;
  SimTime uptime_anchor = 0;
  friend bool operator==(const GrvState&, const GrvState&) = default;
};

struct WeightVector {
  double w1 = 1.0 / 3;  // availability
  double w2 = 1.0 / 3;  // job success
  double w3 = 1.0 / 3;  // custom attribute
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

struct GrvParams {
  double rbase = 1.0;
  double ra_max = 10.0;
  double ra_rate = 0.1;  // per hour of continuous uptime
  double js_init = 0.0;
  double reward = 1.0;
  double penalty = 1.0;
  double js_min = -100.0;
  double js_max = 100.0;
  friend bool operator==(const GrvParams&, const GrvParams&) = default;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const WeightVector& w);
void validate(const GrvParams& p);

struct Violation {
  std::string resource;
  std::string field;
  std::string message;
};

/// Checks every resource invariant. An empty result means the catalog is
/// valid; violations are returned as data rather than thrown.
[[nodiscard]] std::vector<Violation> validate_catalog(std::span<const ResourceRecord> resources);

}  // namespace gridrank
