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

#include "gridrank/domain.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

namespace gridrank {

AvailabilitySchedule::AvailabilitySchedule(std::vector<Interval> intervals)
    : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!(iv.end > iv.start) || iv.start < 0) {
      throw std::invalid_argument(
          fmt::format("availability interval {} is empty or negative: [{}, {})", i, iv.start,
                      iv.end));
    }
    if (i > 0 && iv.start < intervals_[i - 1].end) {
      throw std::invalid_argument(
          fmt::format("availability interval {} overlaps or is out of order", i));
    }
  }
}

AvailabilitySchedule AvailabilitySchedule::always(SimTime horizon) {
  return AvailabilitySchedule({{0, horizon}});
}

bool AvailabilitySchedule::available_at(SimTime t) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](SimTime v, const Interval& iv) { return v < iv.start; });
  if (it == intervals_.begin()) return false;
  return t < std::prev(it)->end;
}

void JobRecord::record_dispatch(ResourceId r, SimTime t) {
  if (running() || completed()) {
    throw std::logic_error(fmt::format("job {} dispatched while running or finished", name));
  }
  history.push_back({JobEvent::Kind::kDispatched, t, r, Interruption::kEvicted});
}

void JobRecord::record_interruption(SimTime t, Interruption reason) {
  if (!running()) throw std::logic_error(fmt::format("job {} interrupted while not running", name));
  const ResourceId host = history.back().resource;
  history.push_back({JobEvent::Kind::kInterrupted, t, host, reason});
  ++restarts;
}

void JobRecord::record_completion(SimTime t) {
  if (!running()) throw std::logic_error(fmt::format("job {} completed while not running", name));
  const ResourceId host = history.back().resource;
  history.push_back({JobEvent::Kind::kCompleted, t, host, Interruption::kEvicted});
}

void validate(const WeightVector& w) {
  for (double v : {w.w1, w.w2, w.w3}) {
    if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("weights must be finite and >= 0");
  }
  if (!(w.w1 + w.w2 + w.w3 > 0)) throw std::invalid_argument("weights must not all be zero");
}

void validate(const GrvParams& p) {
  if (!(p.rbase <= p.ra_max)) throw std::invalid_argument("rbase must not exceed ra_max");
  if (!(p.ra_rate >= 0)) throw std::invalid_argument("ra_rate must be >= 0");
  if (!(p.reward > 0)) throw std::invalid_argument("reward must be > 0");
  if (!(p.penalty > 0)) throw std::invalid_argument("penalty must be > 0");
  if (!(p.js_min <= p.js_init && p.js_init <= p.js_max)) {
    throw std::invalid_argument("js_init must lie within [js_min, js_max]");
  }
}

std::vector<Violation> validate_catalog(std::span<const ResourceRecord> resources) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < resources.size(); ++i) {
    const auto& r = resources[i];
    const std::string who = r.name.empty() ? fmt::format("#{}", i) : r.name;
    if (r.name.empty()) out.push_back({who, "id", "empty id"});
    if (!r.name.empty() && !seen.insert(r.name).second) out.push_back({who, "id", "duplicate id"});
    if (r.id.value != i) out.push_back({who, "id", fmt::format("catalog index {} expected", i)});
    if (r.resource_class.label.empty()) out.push_back({who, "class", "empty class label"});
    if (!(r.nflops > 0) || !std::isfinite(r.nflops)) {
      out.push_back({who, "nflops", fmt::format("must be > 0, got {}", r.nflops)});
    }
    if (r.ncores < 1) out.push_back({who, "ncores", fmt::format("must be >= 1, got {}", r.ncores)});
  }
  return out;
}

}  // namespace gridrank
